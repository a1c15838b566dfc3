#include "opclass/wei.hpp"

#include <algorithm>

namespace opclass {

Wei Wei::from_string(const std::string& text) {
    if (text.empty()) throw_error(ErrorKind::CorpusFormat, "empty wei value");
    constexpr unsigned __int128 max = ~static_cast<unsigned __int128>(0);
    unsigned __int128 acc = 0;
    for (char c : text) {
        if (c < '0' || c > '9')
            throw_error(ErrorKind::CorpusFormat, "non-decimal character in wei value '" + text + "'");
        unsigned digit = static_cast<unsigned>(c - '0');
        if (acc > (max - digit) / 10) throw_error(ErrorKind::CorpusFormat, "wei value overflows 128 bits");
        acc = acc * 10 + digit;
    }
    Wei w;
    w.value_ = acc;
    return w;
}

std::string Wei::to_string() const {
    if (value_ == 0) return "0";
    std::string out;
    unsigned __int128 v = value_;
    while (v > 0) {
        out.push_back(static_cast<char>('0' + static_cast<unsigned>(v % 10)));
        v /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

Wei& Wei::operator+=(const Wei& other) {
    unsigned __int128 sum = value_ + other.value_;
    if (sum < value_) throw_error(ErrorKind::CorpusFormat, "wei sum overflows 128 bits");
    value_ = sum;
    return *this;
}

}  // namespace opclass
