#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "epibundle/errors.hpp"

namespace epibundle {

// Extended real value: finite, +inf or -inf. Comparisons are total
// (-inf < finite < +inf); adding +inf and -inf is a hard error rather
// than a NaN so that indeterminate sums never leak into limit estimates.
class ExtReal {
public:
    enum class Tag { finite, pos_inf, neg_inf };

    ExtReal() : tag_(Tag::finite), value_(0.0) {}
    ExtReal(double v) : tag_(Tag::finite), value_(v) {
        if (std::isnan(v)) throw argument_error("ExtReal: NaN is not a value");
        if (std::isinf(v)) {
            tag_ = v > 0 ? Tag::pos_inf : Tag::neg_inf;
            value_ = 0.0;
        }
    }

    static ExtReal pos_inf() { return ExtReal(Tag::pos_inf); }
    static ExtReal neg_inf() { return ExtReal(Tag::neg_inf); }

    bool is_finite() const { return tag_ == Tag::finite; }
    bool is_pos_inf() const { return tag_ == Tag::pos_inf; }
    bool is_neg_inf() const { return tag_ == Tag::neg_inf; }
    Tag tag() const { return tag_; }

    // Finite value; error when infinite.
    double value() const {
        if (!is_finite()) throw argument_error("ExtReal: value() on infinite");
        return value_;
    }

    // Collapses to an IEEE double (infinities map to +/-HUGE_VAL).
    double as_double() const {
        switch (tag_) {
            case Tag::pos_inf: return std::numeric_limits<double>::infinity();
            case Tag::neg_inf: return -std::numeric_limits<double>::infinity();
            default: return value_;
        }
    }

    ExtReal operator+(const ExtReal& o) const {
        if (is_pos_inf()) {
            if (o.is_neg_inf()) throw argument_error("ExtReal: (+inf) + (-inf)");
            return pos_inf();
        }
        if (is_neg_inf()) {
            if (o.is_pos_inf()) throw argument_error("ExtReal: (-inf) + (+inf)");
            return neg_inf();
        }
        if (!o.is_finite()) return o;
        return ExtReal(value_ + o.value_);
    }

    ExtReal operator-() const {
        if (is_pos_inf()) return neg_inf();
        if (is_neg_inf()) return pos_inf();
        return ExtReal(-value_);
    }

    ExtReal operator-(const ExtReal& o) const { return *this + (-o); }

    // Scaling by a positive constant keeps the sign of infinities.
    ExtReal scaled(double c) const {
        if (c <= 0.0) throw argument_error("ExtReal::scaled: factor must be > 0");
        if (!is_finite()) return *this;
        return ExtReal(c * value_);
    }

    bool operator<(const ExtReal& o) const {
        if (tag_ == o.tag_) return is_finite() && value_ < o.value_;
        if (is_neg_inf()) return true;
        if (o.is_neg_inf()) return false;
        return o.is_pos_inf();
    }
    bool operator>(const ExtReal& o) const { return o < *this; }
    bool operator<=(const ExtReal& o) const { return !(o < *this); }
    bool operator>=(const ExtReal& o) const { return !(*this < o); }
    bool operator==(const ExtReal& o) const {
        return tag_ == o.tag_ && (!is_finite() || value_ == o.value_);
    }
    bool operator!=(const ExtReal& o) const { return !(*this == o); }

    std::string str() const {
        if (is_pos_inf()) return "+inf";
        if (is_neg_inf()) return "-inf";
        return std::to_string(value_);
    }

    friend std::ostream& operator<<(std::ostream& os, const ExtReal& x) {
        return os << x.str();
    }

private:
    explicit ExtReal(Tag t) : tag_(t), value_(0.0) {}

    Tag tag_;
    double value_;
};

inline ExtReal ext_min(const ExtReal& a, const ExtReal& b) { return a < b ? a : b; }
inline ExtReal ext_max(const ExtReal& a, const ExtReal& b) { return a < b ? b : a; }

}  // namespace epibundle
