#pragma once

#include <chrono>
#include <filesystem>
#include <string>

#include <doctest.h>

#include "opclass/errors.hpp"
#include "opclass/rng.hpp"

namespace testsupport {

// Runs fn and returns the ErrorKind it throws; fails the test if it does not
// throw an opclass::Error.
template <typename Fn>
opclass::ErrorKind error_kind_of(Fn&& fn) {
    try {
        fn();
    } catch (const opclass::Error& e) {
        return e.kind();
    } catch (...) {
        FAIL("threw something that is not an opclass::Error");
    }
    FAIL("expected an opclass::Error, nothing was thrown");
    return opclass::ErrorKind::BadConfig;  // unreachable
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        opclass::Rng rng(static_cast<std::uint64_t>(
            std::chrono::steady_clock::now().time_since_epoch().count() + ++counter));
        path_ = std::filesystem::temp_directory_path() /
                ("opclass_test_" + std::to_string(rng.next_u64() % 1000000000));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testsupport
