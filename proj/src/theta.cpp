#include "rmf/theta.hpp"

#include <cmath>
#include <stdexcept>

namespace rmf {

namespace mp = boost::multiprecision;

namespace {

const BigInt kTwo128 = BigInt(1) << 128;

Fixed128 to_fixed(const BigInt& v) {
  // v is already reduced into [0, 2^128).
  const auto lo = static_cast<std::uint64_t>(v & BigInt(~std::uint64_t{0}));
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  return (Fixed128{hi} << 64) | lo;
}

BigInt mod_2_128(const BigInt& v) {
  BigInt r = v % kTwo128;
  if (r < 0) r += kTwo128;
  return r;
}

Fixed128 rational_frac_fixed(const BigRational& v) {
  const BigInt num = mp::numerator(v);
  const BigInt den = mp::denominator(v);
  const BigInt r = num - floor_div(num, den) * den;
  return to_fixed(floor_div(r << 128, den));
}

BigInt parse_int(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty integer in theta spec");
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) throw std::invalid_argument("bad integer in theta spec");
  for (std::size_t j = i; j < s.size(); ++j) {
    if (s[j] < '0' || s[j] > '9') {
      throw std::invalid_argument("bad integer in theta spec: " +
                                  std::string(s));
    }
  }
  BigInt v(std::string(s.substr(i)));
  return s[0] == '-' ? BigInt(-v) : v;
}

unsigned bit_length(BigInt v) {
  if (v < 0) v = -v;
  return v == 0 ? 0 : static_cast<unsigned>(mp::msb(v)) + 1;
}

}  // namespace

BigInt floor_div(const BigInt& num, const BigInt& den) {
  BigInt q = num / den;  // truncates toward zero
  if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
  return q;
}

double fixed_to_double(Fixed128 x) {
  const auto hi = static_cast<std::uint64_t>(x >> 64);
  const auto lo = static_cast<std::uint64_t>(x);
  return std::ldexp(static_cast<double>(hi), -64) +
         std::ldexp(static_cast<double>(lo), -128);
}

Theta Theta::rational(BigInt p, BigInt q) {
  if (q == 0) throw std::invalid_argument("rational theta with zero denominator");
  Theta t;
  t.kind_ = Kind::kRational;
  t.exact_ = BigRational(p, q);
  t.compute_fixed();
  return t;
}

Theta Theta::quadratic(BigInt a, BigInt b, BigInt c, BigInt d) {
  if (c == 0) throw std::invalid_argument("quadratic theta with c = 0");
  if (d < 0) throw std::invalid_argument("quadratic theta needs d >= 0");
  const BigInt root = mp::sqrt(d);
  if (b == 0 || root * root == d) {
    return rational(a + b * root, c);
  }
  Theta t;
  t.kind_ = Kind::kQuadratic;
  t.a_ = std::move(a);
  t.b_ = std::move(b);
  t.c_ = std::move(c);
  t.d_ = std::move(d);
  t.compute_fixed();
  return t;
}

Theta Theta::decimal(std::string_view digits, unsigned precision_bits) {
  if (precision_bits == 0) {
    throw std::invalid_argument("decimal theta needs precision_bits >= 1");
  }
  std::string_view body = digits;
  bool negative = false;
  if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
    negative = body[0] == '-';
    body.remove_prefix(1);
  }
  const auto dot = body.find('.');
  std::string whole(body.substr(0, dot));
  std::string frac = dot == std::string_view::npos
                         ? std::string()
                         : std::string(body.substr(dot + 1));
  if (whole.empty() && frac.empty()) {
    throw std::invalid_argument("empty decimal theta");
  }
  for (const char ch : whole + frac) {
    if (ch < '0' || ch > '9') {
      throw std::invalid_argument("bad decimal theta: " + std::string(digits));
    }
  }
  BigInt num(whole + frac);
  if (negative) num = -num;
  BigInt scale = mp::pow(BigInt(10), static_cast<unsigned>(frac.size()));

  Theta t;
  t.kind_ = Kind::kDecimal;
  t.exact_ = BigRational(num, scale);
  t.precision_bits_ = precision_bits;
  t.digits_ = std::string(digits);
  t.compute_fixed();
  return t;
}

Theta Theta::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("theta spec needs a kind prefix: " +
                                std::string(spec));
  }
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view body = spec.substr(colon + 1);
  if (kind == "rational") {
    const auto slash = body.find('/');
    if (slash == std::string_view::npos) return rational(parse_int(body), 1);
    return rational(parse_int(body.substr(0, slash)),
                    parse_int(body.substr(slash + 1)));
  }
  if (kind == "quadratic") {
    BigInt parts[4];
    std::string_view rest = body;
    for (int i = 0; i < 4; ++i) {
      const auto comma = rest.find(',');
      if ((comma == std::string_view::npos) != (i == 3)) {
        throw std::invalid_argument("quadratic theta needs a,b,c,d");
      }
      parts[i] = parse_int(rest.substr(0, comma));
      if (i < 3) rest.remove_prefix(comma + 1);
    }
    return quadratic(parts[0], parts[1], parts[2], parts[3]);
  }
  if (kind == "decimal") {
    const auto at = body.find('@');
    if (at == std::string_view::npos) {
      throw std::invalid_argument("decimal theta needs @<precision-bits>");
    }
    const BigInt bits = parse_int(body.substr(at + 1));
    if (bits < 0 || bits > 1u << 20) {
      throw std::invalid_argument("decimal precision out of range");
    }
    return decimal(body.substr(0, at), static_cast<unsigned>(bits));
  }
  throw std::invalid_argument("unknown theta kind: " + std::string(kind));
}

std::string Theta::spec() const {
  switch (kind_) {
    case Kind::kRational:
      return "rational:" + mp::numerator(exact_).str() + "/" +
             mp::denominator(exact_).str();
    case Kind::kQuadratic:
      return "quadratic:" + a_.str() + "," + b_.str() + "," + c_.str() + "," +
             d_.str();
    case Kind::kDecimal:
      return "decimal:" + digits_ + "@" + std::to_string(precision_bits_);
  }
  return {};
}

double Theta::to_double() const {
  if (kind_ == Kind::kQuadratic) {
    return (a_.convert_to<double>() +
            b_.convert_to<double>() * std::sqrt(d_.convert_to<double>())) /
           c_.convert_to<double>();
  }
  return exact_.convert_to<double>();
}

void Theta::compute_fixed() {
  switch (kind_) {
    case Kind::kRational:
      frac_ = rational_frac_fixed(exact_);
      error_log2_ = -128;
      return;
    case Kind::kDecimal:
      frac_ = rational_frac_fixed(exact_);
      error_log2_ = 1 - static_cast<int>(std::min(precision_bits_, 127u));
      return;
    case Kind::kQuadratic: {
      // floor(|b| sqrt(d) 2^128) = isqrt(b^2 d 2^256); the true numerator
      // a 2^128 + b sqrt(d) 2^128 lies strictly inside (low, low + 1).
      BigInt radicand = b_ * b_ * d_;
      radicand <<= 256;
      const BigInt s = mp::sqrt(radicand);
      BigInt low = a_ << 128;
      if (b_ > 0) {
        low += s;
      } else {
        low -= s + 1;
      }
      BigInt den = c_;
      if (den < 0) {
        low = -low - 1;
        den = -den;
      }
      frac_ = to_fixed(mod_2_128(floor_div(low, den)));
      error_log2_ = -126;
      return;
    }
  }
}

Theta Theta::times(std::int64_t m) const {
  const BigInt mm(m);
  switch (kind_) {
    case Kind::kRational:
      return rational(mp::numerator(exact_) * mm, mp::denominator(exact_));
    case Kind::kQuadratic:
      return quadratic(a_ * mm, b_ * mm, c_, d_);
    case Kind::kDecimal: {
      if (m == 0) return rational(0, 1);
      const unsigned lost = bit_length(mm);
      if (precision_bits_ <= lost) {
        throw std::invalid_argument(
            "scaling exhausts the decimal theta's precision");
      }
      // Rebuild the digit string of the scaled value with the same number of
      // fractional digits.
      const auto dot = digits_.find('.');
      const std::size_t places =
          dot == std::string::npos ? 0 : digits_.size() - dot - 1;
      const BigInt scale = mp::pow(BigInt(10), static_cast<unsigned>(places));
      BigInt n = mp::numerator(exact_) * scale / mp::denominator(exact_) * mm;
      const bool negative = n < 0;
      std::string text = (negative ? BigInt(-n) : n).str();
      if (places > 0) {
        if (text.size() <= places) text.insert(0, places + 1 - text.size(), '0');
        text.insert(text.size() - places, ".");
      }
      if (negative) text.insert(0, "-");
      return decimal(text, precision_bits_ - lost);
    }
  }
  return *this;
}

}  // namespace rmf
