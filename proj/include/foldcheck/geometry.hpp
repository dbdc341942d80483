#ifndef FOLDCHECK_GEOMETRY_HPP
#define FOLDCHECK_GEOMETRY_HPP

// Exact rational plane geometry. Every predicate and construction here is
// closed over the rationals; there is no floating point on any decision path.

#include <boost/multiprecision/gmp.hpp>

#include <algorithm>
#include <array>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace foldcheck {

using Rat = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                          boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline int sign_of(const Rat& r) { return r.sign(); }

/// Parses "12", "-0.125", "3.5e-2" or "7/3" into an exact rational.
inline Rat parse_rat(std::string_view text) {
  auto fail = [&] { throw GeometryError("not an exact number: '" + std::string(text) + "'"); };
  if (text.empty()) fail();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rat num = parse_rat(text.substr(0, slash));
    Rat den = parse_rat(text.substr(slash + 1));
    if (den == 0) fail();
    return num / den;
  }
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  std::string digits;
  long long frac_digits = 0;
  bool seen_point = false;
  bool seen_digit = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) fail();
  long long exponent = 0;
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') fail();
    ++i;
    bool exp_negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      exp_negative = text[i] == '-';
      ++i;
    }
    if (i == text.size()) fail();
    for (; i < text.size(); ++i) {
      if (text[i] < '0' || text[i] > '9') fail();
      exponent = exponent * 10 + (text[i] - '0');
      if (exponent > 100000) fail();
    }
    if (exp_negative) exponent = -exponent;
  }
  // A leading zero would make the string constructor read octal.
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  BigInt mantissa(digits);
  long long scale = exponent - frac_digits;
  BigInt ten_pow = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
  Rat value = scale >= 0 ? Rat(mantissa * ten_pow) : Rat(mantissa) / Rat(ten_pow);
  return negative ? Rat(-value) : value;
}

/// Decimal text when the value has a terminating expansion, "p/q" otherwise.
inline std::string format_rat(const Rat& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  BigInt d = den;
  unsigned twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d != 1) return num.str() + "/" + den.str();
  unsigned places = std::max(twos, fives);
  BigInt scaled = num * boost::multiprecision::pow(BigInt(10), places) / den;
  bool negative = scaled < 0;
  std::string s = (negative ? BigInt(-scaled) : scaled).str();
  if (s.size() <= places) s.insert(0, places - s.size() + 1, '0');
  s.insert(s.size() - places, ".");
  return negative ? "-" + s : s;
}

struct Point {
  Rat x;
  Rat y;

  friend bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
  /// Lexicographic: x first, then y.
  friend bool operator<(const Point& a, const Point& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  }
  friend Point operator+(const Point& a, const Point& b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(const Point& a, const Point& b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(const Rat& s, const Point& p) { return {s * p.x, s * p.y}; }
  friend std::ostream& operator<<(std::ostream& os, const Point& p) {
    return os << '(' << format_rat(p.x) << ", " << format_rat(p.y) << ')';
  }
};

inline Rat cross(const Point& u, const Point& v) { return u.x * v.y - u.y * v.x; }
inline Rat dot(const Point& u, const Point& v) { return u.x * v.x + u.y * v.y; }
inline Rat squared_distance(const Point& a, const Point& b) {
  Point d = b - a;
  return dot(d, d);
}
inline Point midpoint(const Point& a, const Point& b) {
  return {(a.x + b.x) / 2, (a.y + b.y) / 2};
}

/// +1 if c lies left of the directed line a->b, -1 if right, 0 if collinear.
inline int orient(const Point& a, const Point& b, const Point& c) {
  return sign_of(cross(b - a, c - a));
}

/// Strict weak order of direction vectors by angle in [0, 2pi).
inline bool angle_less(const Point& u, const Point& v) {
  auto upper = [](const Point& d) { return d.y > 0 || (d.y == 0 && d.x > 0); };
  bool uu = upper(u), vu = upper(v);
  if (uu != vu) return uu;
  return cross(u, v) > 0;
}

class Segment {
 public:
  Segment(Point a, Point b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_ == b_) throw GeometryError("degenerate segment");
  }
  const Point& a() const { return a_; }
  const Point& b() const { return b_; }
  Point direction() const { return b_ - a_; }
  /// Same segment with endpoints in lexicographic order.
  Segment canonical() const { return b_ < a_ ? Segment(b_, a_) : *this; }
  friend bool operator==(const Segment& s, const Segment& t) { return s.a_ == t.a_ && s.b_ == t.b_; }
  friend std::ostream& operator<<(std::ostream& os, const Segment& s) {
    return os << s.a_ << '-' << s.b_;
  }

 private:
  Point a_;
  Point b_;
};

inline bool same_undirected(const Segment& s, const Segment& t) {
  return s.canonical() == t.canonical();
}

/// Closed-segment membership.
inline bool on_segment(const Point& p, const Segment& s) {
  if (orient(s.a(), s.b(), p) != 0) return false;
  const Point& lo = std::min(s.a(), s.b());
  const Point& hi = std::max(s.a(), s.b());
  return !(p < lo) && !(hi < p);
}

/// p lies on s but is not one of its endpoints.
inline bool in_segment_interior(const Point& p, const Segment& s) {
  return p != s.a() && p != s.b() && on_segment(p, s);
}

/// t lies entirely on s (collinear and within its extent).
inline bool segment_contains(const Segment& s, const Segment& t) {
  return on_segment(t.a(), s) && on_segment(t.b(), s);
}

struct Intersection {
  enum class Kind { Empty, Point, Subsegment };
  Kind kind = Kind::Empty;
  Point p;  // the point, or the lexicographically smaller overlap end
  Point q;  // the larger overlap end (Subsegment only)
};

inline Intersection segment_intersection(const Segment& s, const Segment& t) {
  int o1 = orient(s.a(), s.b(), t.a());
  int o2 = orient(s.a(), s.b(), t.b());
  int o3 = orient(t.a(), t.b(), s.a());
  int o4 = orient(t.a(), t.b(), s.b());
  if (o1 == 0 && o2 == 0) {
    // Collinear points are ordered lexicographically along their common line.
    Point lo = std::max(std::min(s.a(), s.b()), std::min(t.a(), t.b()));
    Point hi = std::min(std::max(s.a(), s.b()), std::max(t.a(), t.b()));
    if (hi < lo) return {};
    if (lo == hi) return {Intersection::Kind::Point, lo, lo};
    return {Intersection::Kind::Subsegment, lo, hi};
  }
  if (o1 * o2 > 0 || o3 * o4 > 0) return {};
  Point ds = s.direction();
  Point dt = t.direction();
  Rat param = cross(t.a() - s.a(), dt) / cross(ds, dt);
  Point p = s.a() + param * ds;
  return {Intersection::Kind::Point, p, p};
}

/// Orientation-reversing or preserving rigid motion x -> M x + t with M orthogonal.
class Isometry {
 public:
  Isometry() : m_{Rat(1), Rat(0), Rat(0), Rat(1)}, t_{Rat(0), Rat(0)} {}
  Isometry(Rat m00, Rat m01, Rat m10, Rat m11, Point translation)
      : m_{std::move(m00), std::move(m01), std::move(m10), std::move(m11)},
        t_(std::move(translation)) {
    if (!is_orthogonal()) throw GeometryError("linear part is not orthogonal");
  }

  static Isometry identity() { return {}; }

  Point apply(const Point& p) const {
    return {m_[0] * p.x + m_[1] * p.y + t_.x, m_[2] * p.x + m_[3] * p.y + t_.y};
  }
  Point operator()(const Point& p) const { return apply(p); }
  Segment apply(const Segment& s) const { return {apply(s.a()), apply(s.b())}; }

  Rat determinant() const { return m_[0] * m_[3] - m_[1] * m_[2]; }
  /// +1 for rotations and translations, -1 for reflections and glides.
  int sign() const { return sign_of(determinant()); }

  const Point& translation() const { return t_; }
  const Rat& linear(int row, int col) const { return m_[row * 2 + col]; }

  bool is_orthogonal() const {
    return m_[0] * m_[0] + m_[2] * m_[2] == 1 && m_[1] * m_[1] + m_[3] * m_[3] == 1 &&
           m_[0] * m_[1] + m_[2] * m_[3] == 0;
  }

  Isometry inverse() const {
    // Transpose of an orthogonal matrix is its inverse.
    Isometry r;
    r.m_ = {m_[0], m_[2], m_[1], m_[3]};
    r.t_ = {-(r.m_[0] * t_.x + r.m_[1] * t_.y), -(r.m_[2] * t_.x + r.m_[3] * t_.y)};
    return r;
  }

  friend bool operator==(const Isometry& f, const Isometry& g) {
    return f.m_ == g.m_ && f.t_ == g.t_;
  }
  friend bool operator!=(const Isometry& f, const Isometry& g) { return !(f == g); }

  /// (f . g)(p) = f(g(p)).
  friend Isometry compose(const Isometry& f, const Isometry& g) {
    Isometry r;
    r.m_ = {f.m_[0] * g.m_[0] + f.m_[1] * g.m_[2], f.m_[0] * g.m_[1] + f.m_[1] * g.m_[3],
            f.m_[2] * g.m_[0] + f.m_[3] * g.m_[2], f.m_[2] * g.m_[1] + f.m_[3] * g.m_[3]};
    r.t_ = f.apply(g.t_);
    return r;
  }

  friend std::ostream& operator<<(std::ostream& os, const Isometry& f) {
    return os << "[[" << format_rat(f.m_[0]) << ", " << format_rat(f.m_[1]) << "], ["
              << format_rat(f.m_[2]) << ", " << format_rat(f.m_[3]) << "]] + " << f.t_;
  }

 private:
  std::array<Rat, 4> m_;
  Point t_;
};

/// Reflection across the line through p1 and p2.
inline Isometry reflect_line(const Point& p1, const Point& p2) {
  if (p1 == p2) throw GeometryError("degenerate line: reflection needs two distinct points");
  Point d = p2 - p1;
  Rat n = dot(d, d);
  Rat c = (d.x * d.x - d.y * d.y) / n;
  Rat s = 2 * d.x * d.y / n;
  // x -> M (x - p1) + p1
  Point t{p1.x - (c * p1.x + s * p1.y), p1.y - (s * p1.x - c * p1.y)};
  return Isometry(c, s, s, -c, t);
}

inline Isometry reflect_line(const Segment& s) { return reflect_line(s.a(), s.b()); }

/// Twice the signed area of a closed vertex cycle (positive when counterclockwise).
inline Rat twice_signed_area(const std::vector<Point>& cycle) {
  Rat sum = 0;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    sum += cross(cycle[i], cycle[(i + 1) % cycle.size()]);
  }
  return sum;
}

enum class Location { Inside, Boundary, Outside };

inline std::ostream& operator<<(std::ostream& os, Location l) {
  switch (l) {
    case Location::Inside: return os << "Inside";
    case Location::Boundary: return os << "Boundary";
    case Location::Outside: return os << "Outside";
  }
  return os;
}

/// Crossing-number classification against any closed vertex cycle. Valid for
/// simple and weakly simple cycles alike.
inline Location locate_in_cycle(const Point& p, const std::vector<Point>& cycle) {
  bool inside = false;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const Point& a = cycle[i];
    const Point& b = cycle[(i + 1) % cycle.size()];
    if (a != b && on_segment(p, Segment(a, b))) return Location::Boundary;
    if ((a.y > p.y) != (b.y > p.y)) {
      int o = orient(a, b, p);
      if (b.y > a.y ? o > 0 : o < 0) inside = !inside;
    }
  }
  return inside ? Location::Inside : Location::Outside;
}

/// A simple polygon: a closed cycle of at least three vertices whose edges
/// meet only at shared consecutive vertices. Collinear consecutive vertices
/// are allowed; orientation is not normalized.
class Polygon {
 public:
  Polygon() = default;  // empty; only as a placeholder before assignment
  explicit Polygon(std::vector<Point> vertices) : v_(std::move(vertices)) {
    if (auto why = simplicity_violation(v_); !why.empty()) {
      throw GeometryError("polygon is not simple: " + why);
    }
  }
  /// Skips the O(n^2) simplicity check for cycles produced by this library.
  static Polygon trusted(std::vector<Point> vertices) { return Polygon(std::move(vertices), 0); }

  const std::vector<Point>& vertices() const { return v_; }
  std::size_t size() const { return v_.size(); }
  const Point& operator[](std::size_t i) const { return v_[i]; }
  Segment side(std::size_t i) const { return {v_[i], v_[(i + 1) % v_.size()]}; }
  Rat twice_signed_area() const { return foldcheck::twice_signed_area(v_); }
  Rat area() const { return boost::multiprecision::abs(twice_signed_area()) / 2; }
  bool counterclockwise() const { return twice_signed_area() > 0; }

  Polygon transformed(const Isometry& f) const {
    std::vector<Point> out;
    out.reserve(v_.size());
    for (const auto& p : v_) out.push_back(f(p));
    return trusted(std::move(out));
  }

  /// Empty string when simple, otherwise a description of the first defect.
  static std::string simplicity_violation(const std::vector<Point>& v) {
    const std::size_t n = v.size();
    if (n < 3) return "fewer than three vertices";
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] == v[(i + 1) % n]) return "repeated consecutive vertex";
    }
    for (std::size_t i = 0; i < n; ++i) {
      Segment si(v[i], v[(i + 1) % n]);
      for (std::size_t j = i + 1; j < n; ++j) {
        Segment sj(v[j], v[(j + 1) % n]);
        auto hit = segment_intersection(si, sj);
        if (hit.kind == Intersection::Kind::Empty) continue;
        // Consecutive sides may touch only at the vertex they share.
        bool next = j == i + 1;
        bool wrap = i == 0 && j == n - 1;
        if (hit.kind == Intersection::Kind::Point &&
            ((next && hit.p == v[j]) || (wrap && hit.p == v[0]))) {
          continue;
        }
        return "edges " + std::to_string(i) + " and " + std::to_string(j) + " intersect";
      }
    }
    if (foldcheck::twice_signed_area(v) == 0) return "zero area";
    return {};
  }

 private:
  Polygon(std::vector<Point> vertices, int) : v_(std::move(vertices)) {}
  std::vector<Point> v_;
};

inline Location point_in_polygon(const Point& p, const Polygon& poly) {
  return locate_in_cycle(p, poly.vertices());
}

}  // namespace foldcheck

#endif  // FOLDCHECK_GEOMETRY_HPP
