#include "aquad/forms.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "aquad/error.hpp"

namespace aquad::forms {

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m{n, n, std::vector<Rational>(n * n, Rational(0))};
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t{cols, rows, std::vector<Rational>(data.size())};
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) t.at(c, r) = at(r, c);
  return t;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& rhs) const {
  require(cols == rhs.rows, ErrorCode::InvalidArgument, "matrix shape mismatch");
  RationalMatrix out{rows, rhs.cols, std::vector<Rational>(rows * rhs.cols, Rational(0))};
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = 0; k < cols; ++k) {
      if (at(r, k) == 0) continue;
      for (std::size_t c = 0; c < rhs.cols; ++c) out.at(r, c) += at(r, k) * rhs.at(k, c);
    }
  return out;
}

Rational RationalMatrix::determinant() const {
  require(rows == cols, ErrorCode::InvalidArgument, "determinant of non-square matrix");
  RationalMatrix a = *this;
  Rational det = 1;
  for (std::size_t c = 0; c < cols; ++c) {
    std::size_t pivot = c;
    while (pivot < rows && a.at(pivot, c) == 0) ++pivot;
    if (pivot == rows) return 0;
    if (pivot != c) {
      for (std::size_t k = 0; k < cols; ++k) std::swap(a.at(pivot, k), a.at(c, k));
      det = -det;
    }
    det *= a.at(c, c);
    for (std::size_t r = c + 1; r < rows; ++r) {
      if (a.at(r, c) == 0) continue;
      Rational factor = a.at(r, c) / a.at(c, c);
      for (std::size_t k = c; k < cols; ++k) a.at(r, k) -= factor * a.at(c, k);
    }
  }
  return det;
}

namespace {

RationalMatrix gram_matrix(std::size_t n, const std::vector<std::int64_t>& gram) {
  RationalMatrix g{n, n, std::vector<Rational>(n * n)};
  for (std::size_t i = 0; i < n * n; ++i) g.data[i] = Rational(static_cast<long>(gram[i]));
  return g;
}

DiagonalModel eliminate(std::size_t n, const std::vector<std::int64_t>& gram) {
  RationalMatrix a = gram_matrix(n, gram);
  RationalMatrix t = RationalMatrix::identity(n);
  // Congruence operations: each column op on T is mirrored as row+column ops on A.
  auto add_multiple = [&](std::size_t target, std::size_t source, const Rational& factor) {
    for (std::size_t r = 0; r < n; ++r) a.at(r, target) += factor * a.at(r, source);
    for (std::size_t c = 0; c < n; ++c) a.at(target, c) += factor * a.at(source, c);
    for (std::size_t r = 0; r < n; ++r) t.at(r, target) += factor * t.at(r, source);
  };
  auto swap_axes = [&](std::size_t i, std::size_t j) {
    for (std::size_t r = 0; r < n; ++r) std::swap(a.at(r, i), a.at(r, j));
    for (std::size_t c = 0; c < n; ++c) std::swap(a.at(i, c), a.at(j, c));
    for (std::size_t r = 0; r < n; ++r) std::swap(t.at(r, i), t.at(r, j));
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (a.at(i, i) == 0) {
      std::size_t j = i + 1;
      while (j < n && a.at(j, j) == 0) ++j;
      if (j < n) {
        swap_axes(i, j);
      } else {
        j = i + 1;
        while (j < n && a.at(i, j) == 0) ++j;
        if (j == n) fail(ErrorCode::DegenerateForm, "Gram matrix is singular");
        add_multiple(i, j, Rational(1));  // new a_ii = 2 a_ij != 0
      }
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (a.at(i, j) == 0) continue;
      Rational factor = -a.at(i, j) / a.at(i, i);
      add_multiple(j, i, factor);
    }
  }
  DiagonalModel model;
  model.basis = std::move(t);
  for (std::size_t i = 0; i < n; ++i) {
    if (a.at(i, i) == 0) fail(ErrorCode::DegenerateForm, "Gram matrix is singular");
    model.diagonal.push_back(a.at(i, i));
  }
  return model;
}

}  // namespace

QuadraticForm::QuadraticForm(std::size_t n, std::vector<std::int64_t> gram)
    : n_(n), gram_(std::move(gram)) {
  require(n_ >= 1, ErrorCode::InvalidArgument, "form needs at least one variable");
  require(gram_.size() == n_ * n_, ErrorCode::InvalidArgument, "Gram matrix has wrong size");
  diagonal_ = true;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      require(gram_[i * n_ + j] == gram_[j * n_ + i], ErrorCode::InvalidArgument, "Gram matrix is not symmetric");
      if (i != j && gram_[i * n_ + j] != 0) diagonal_ = false;
    }
  Rational det = gram_matrix(n_, gram_).determinant();
  if (det == 0) fail(ErrorCode::DegenerateForm, "det(G) = 0");
  det_ = det.get_num();
  model_ = eliminate(n_, gram_);
}

QuadraticForm QuadraticForm::diagonal(std::span<const std::int64_t> coefficients) {
  std::size_t n = coefficients.size();
  std::vector<std::int64_t> gram(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) gram[i * n + i] = coefficients[i];
  return QuadraticForm(n, std::move(gram));
}

std::vector<std::int64_t> QuadraticForm::diagonal_coefficients() const {
  std::vector<std::int64_t> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = entry(i, i);
  return out;
}

Integer QuadraticForm::eval(std::span<const Integer> x) const {
  Integer total = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    total += Integer(static_cast<long>(entry(i, i))) * x[i] * x[i];
    for (std::size_t j = i + 1; j < n_; ++j)
      if (entry(i, j) != 0) total += 2 * Integer(static_cast<long>(entry(i, j))) * x[i] * x[j];
  }
  return total;
}

Rational QuadraticForm::eval(std::span<const Rational> x) const {
  Rational total = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    total += Rational(static_cast<long>(entry(i, i))) * x[i] * x[i];
    for (std::size_t j = i + 1; j < n_; ++j)
      if (entry(i, j) != 0) total += 2 * Rational(static_cast<long>(entry(i, j))) * x[i] * x[j];
  }
  return total;
}

std::int64_t QuadraticForm::eval(std::span<const std::int64_t> x) const {
  i128 total = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    i128 row = 0;
    for (std::size_t j = 0; j < n_; ++j) row += static_cast<i128>(entry(i, j)) * x[j];
    total += row * x[i];
  }
  return narrow(total);
}

std::int64_t QuadraticForm::eval_mod(std::span<const std::int64_t> x, std::int64_t modulus) const {
  i128 total = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    i128 row = 0;
    for (std::size_t j = 0; j < n_; ++j) row += static_cast<i128>(mod_floor(entry(i, j), modulus)) * x[j];
    row %= modulus;
    total = (total + row * x[i]) % modulus;
  }
  return static_cast<std::int64_t>(total);
}

namespace {

std::vector<std::int64_t> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<std::int64_t> out;
  std::string item;
  std::stringstream in(text);
  while (std::getline(in, item, ',')) {
    std::string trimmed;
    for (char c : item)
      if (!std::isspace(static_cast<unsigned char>(c))) trimmed.push_back(c);
    if (trimmed.empty()) fail(ErrorCode::InvalidArgument, "empty entry in " + what + " '" + text + "'");
    std::size_t used = 0;
    long long value = 0;
    try {
      value = std::stoll(trimmed, &used);
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, "non-integer entry '" + trimmed + "' in " + what);
    }
    if (used != trimmed.size()) fail(ErrorCode::InvalidArgument, "non-integer entry '" + trimmed + "' in " + what);
    out.push_back(value);
  }
  if (!text.empty() && text.back() == ',') fail(ErrorCode::InvalidArgument, "trailing comma in " + what);
  return out;
}

}  // namespace

QuadraticForm QuadraticForm::parse(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text.push_back(c);
  if (text.empty()) fail(ErrorCode::InvalidArgument, "empty form literal");
  if (text.front() != '[') {
    auto coefficients = parse_int_list(text, "form");
    return diagonal(coefficients);
  }
  if (text.size() < 4 || text.substr(0, 2) != "[[" || text.substr(text.size() - 2) != "]]")
    fail(ErrorCode::InvalidArgument, "Gram literal must look like [[a,b],[b,c]]");
  std::string body = text.substr(2, text.size() - 4);
  std::vector<std::vector<std::int64_t>> rows;
  std::size_t start = 0;
  while (true) {
    std::size_t end = body.find("],[", start);
    rows.push_back(parse_int_list(body.substr(start, end == std::string::npos ? std::string::npos : end - start), "Gram row"));
    if (end == std::string::npos) break;
    start = end + 3;
  }
  std::size_t n = rows.size();
  std::vector<std::int64_t> gram;
  for (const auto& row : rows) {
    if (row.size() != n) fail(ErrorCode::InvalidArgument, "Gram matrix is not square");
    gram.insert(gram.end(), row.begin(), row.end());
  }
  return QuadraticForm(n, std::move(gram));
}

std::string QuadraticForm::to_string() const {
  std::ostringstream out;
  if (diagonal_) {
    for (std::size_t i = 0; i < n_; ++i) out << (i ? "," : "") << entry(i, i);
    return out.str();
  }
  out << '[';
  for (std::size_t i = 0; i < n_; ++i) {
    out << (i ? ",[" : "[");
    for (std::size_t j = 0; j < n_; ++j) out << (j ? "," : "") << entry(i, j);
    out << ']';
  }
  out << ']';
  return out.str();
}

DiagonalModel diagonalize(const QuadraticForm& q) { return q.diagonal_model(); }

Place Place::prime(std::int64_t p) {
  require(p >= 2 && is_prime(static_cast<std::uint64_t>(p)), ErrorCode::InvalidArgument,
          "place must be a prime, got " + std::to_string(p));
  return Place(p);
}

std::string Place::to_string() const { return is_real() ? "inf" : std::to_string(p_); }

bool Box::contains(std::span<const Rational> x) const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  return true;
}

Box Box::parse(const std::string& text, std::size_t dim) {
  Box box;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) fail(ErrorCode::InvalidArgument, "region axis '" + item + "' must be lo:hi");
    box.lower.push_back(parse_rational(item.substr(0, colon)));
    box.upper.push_back(parse_rational(item.substr(colon + 1)));
  }
  if (box.lower.empty()) fail(ErrorCode::InvalidArgument, "empty region");
  if (dim > 0 && box.lower.size() == 1 && dim > 1) {
    box.lower.assign(dim, box.lower[0]);
    box.upper.assign(dim, box.upper[0]);
  }
  if (dim > 0 && box.dim() != dim)
    fail(ErrorCode::InvalidArgument, "region has " + std::to_string(box.dim()) + " axes, form has " + std::to_string(dim));
  for (std::size_t i = 0; i < box.dim(); ++i)
    require(box.lower[i] < box.upper[i], ErrorCode::InvalidArgument, "region axis with empty interior");
  return box;
}

Box Box::cube(std::size_t dim, const Rational& half_width) {
  require(half_width > 0, ErrorCode::InvalidArgument, "cube half-width must be positive");
  return Box{std::vector<Rational>(dim, -half_width), std::vector<Rational>(dim, half_width)};
}

std::string Box::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (i) out += ',';
    out += aquad::to_string(lower[i]) + ":" + aquad::to_string(upper[i]);
  }
  return out;
}

QuadricInstance::QuadricInstance(QuadraticForm form_, std::int64_t m_, std::optional<SData> s_data_,
                                 std::optional<Box> region_)
    : form(std::move(form_)), m(m_), s_data(s_data_), region(std::move(region_)) {
  require(m != 0, ErrorCode::InvalidArgument, "m must be nonzero");
  if (s_data) {
    require(s_data->p0 >= 2 && is_prime(static_cast<std::uint64_t>(s_data->p0)), ErrorCode::InvalidArgument,
            "p0 must be prime");
    require(s_data->h >= 0, ErrorCode::InvalidArgument, "h must be nonnegative");
  }
  if (region) {
    require(region->dim() == form.dim(), ErrorCode::InvalidArgument, "region dimension differs from form");
    for (std::size_t i = 0; i < region->dim(); ++i)
      require(region->lower[i] < region->upper[i], ErrorCode::InvalidArgument, "region axis with empty interior");
  }
}

namespace {

// Integer representative of the square class of a nonzero rational.
Integer square_class_rep(const Rational& a) {
  require(a != 0, ErrorCode::InvalidArgument, "Hilbert symbol argument must be nonzero");
  return a.get_num() * a.get_den();
}

struct Split {
  int exponent;
  Integer unit;
};

Split split_at(const Integer& a, std::int64_t p) {
  Integer prime(static_cast<long>(p));
  Integer unit;
  int e = static_cast<int>(mpz_remove(unit.get_mpz_t(), a.get_mpz_t(), prime.get_mpz_t()));
  return {e, unit};
}

int mod8(const Integer& u) {
  Integer r;
  mpz_fdiv_r_ui(r.get_mpz_t(), u.get_mpz_t(), 8);
  return static_cast<int>(r.get_si());
}

}  // namespace

int hilbert_symbol(const Rational& a, const Rational& b, Place v) {
  Integer x = square_class_rep(a), y = square_class_rep(b);
  if (v.is_real()) return (x < 0 && y < 0) ? -1 : 1;
  std::int64_t p = v.prime();
  auto [alpha, u] = split_at(x, p);
  auto [beta, w] = split_at(y, p);
  if (p != 2) {
    int sign = ((alpha & 1) && (beta & 1) && ((p - 1) / 2) % 2 == 1) ? -1 : 1;
    if (beta & 1) sign *= legendre(u, p);
    if (alpha & 1) sign *= legendre(w, p);
    return sign;
  }
  int ur = mod8(u), wr = mod8(w);
  int eps_u = ((ur - 1) / 2) & 1, eps_w = ((wr - 1) / 2) & 1;
  int omega_u = ((ur * ur - 1) / 8) & 1, omega_w = ((wr * wr - 1) / 8) & 1;
  int exponent = eps_u * eps_w + alpha * omega_w + beta * omega_u;
  return (exponent & 1) ? -1 : 1;
}

bool is_local_square(const Rational& a, Place v) {
  Integer x = square_class_rep(a);
  if (v.is_real()) return x > 0;
  std::int64_t p = v.prime();
  auto [e, u] = split_at(x, p);
  if (e & 1) return false;
  if (p == 2) return mod8(u) == 1;
  return legendre(u, p) == 1;
}

int hasse_invariant(std::span<const Rational> diagonal, Place v) {
  int eps = 1;
  for (std::size_t i = 0; i < diagonal.size(); ++i)
    for (std::size_t j = i + 1; j < diagonal.size(); ++j) eps *= hilbert_symbol(diagonal[i], diagonal[j], v);
  return eps;
}

int hasse_invariant(const QuadraticForm& q, Place v) { return hasse_invariant(q.diagonal_model().diagonal, v); }

bool is_isotropic_local(std::span<const Rational> a, Place v) {
  std::size_t n = a.size();
  if (n <= 1) return false;
  if (v.is_real()) {
    bool pos = std::any_of(a.begin(), a.end(), [](const Rational& x) { return x > 0; });
    bool neg = std::any_of(a.begin(), a.end(), [](const Rational& x) { return x < 0; });
    return pos && neg;
  }
  if (n >= 5) return true;
  Rational d = 1;
  for (const auto& x : a) d *= x;
  if (n == 2) return is_local_square(-d, v);
  int eps = hasse_invariant(a, v);
  if (n == 3) return hilbert_symbol(Rational(-1), -d, v) == eps;
  return !is_local_square(d, v) || eps == hilbert_symbol(Rational(-1), Rational(-1), v);
}

bool is_isotropic_local(const QuadraticForm& q, Place v) { return is_isotropic_local(q.diagonal_model().diagonal, v); }

bool represents_local(const QuadraticForm& q, std::int64_t m, Place v) {
  require(m != 0, ErrorCode::InvalidArgument, "represents_local needs m != 0");
  std::vector<Rational> extended = q.diagonal_model().diagonal;
  extended.push_back(Rational(static_cast<long>(-m)));
  return is_isotropic_local(extended, v);
}

std::vector<std::int64_t> critical_primes(const QuadraticForm& q, std::int64_t m) {
  std::vector<std::int64_t> primes{2};
  for (const Integer& part : {Integer(abs(q.det())), Integer(static_cast<long>(m < 0 ? -m : m))})
    for (auto p : distinct(factorize(part))) primes.push_back(static_cast<std::int64_t>(p));
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  return primes;
}

bool represents_global(const QuadraticForm& q, std::int64_t m) {
  require(m != 0, ErrorCode::InvalidArgument, "represents_global needs m != 0");
  if (q.dim() == 1) {
    Rational ratio(static_cast<long>(m), static_cast<long>(q.entry(0, 0)));
    ratio.canonicalize();
    return ratio > 0 && mpz_perfect_square_p(ratio.get_num_mpz_t()) && mpz_perfect_square_p(ratio.get_den_mpz_t());
  }
  if (!represents_local(q, m, Place::real())) return false;
  for (auto p : critical_primes(q, m))
    if (!represents_local(q, m, Place::prime(p))) return false;
  return true;
}

}  // namespace aquad::forms
