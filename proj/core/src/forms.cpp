#include "flateta/forms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <string>

#include "flateta/errors.hpp"

namespace flateta {

namespace {

void require_same_shape(const TrigPolyForm& a, const TrigPolyForm& b, const char* op) {
  if (a.dim() != b.dim() || a.rank() != b.rank()) {
    throw ShapeError(std::string(op) + ": shape mismatch (dim " + std::to_string(a.dim()) +
                     " vs " + std::to_string(b.dim()) + ", rank " + std::to_string(a.rank()) +
                     " vs " + std::to_string(b.rank()) + ")");
  }
}

Frequency add_frequencies(const Frequency& a, const Frequency& b) {
  Frequency out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] + b[j];
  return out;
}

bool is_zero_matrix(const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (m.data()[i] != Complex(0.0, 0.0)) return false;
  }
  return true;
}

}  // namespace

// IndexSet ------------------------------------------------------------------

IndexSet IndexSet::of(std::initializer_list<int> indices) {
  return of(std::span<const int>(indices.begin(), indices.size()));
}

IndexSet IndexSet::of(std::span<const int> indices) {
  std::uint32_t mask = 0;
  for (int j : indices) {
    if (j < 0 || j >= 32) throw DomainError("IndexSet: index out of range");
    mask |= 1u << j;
  }
  return IndexSet(mask);
}

int IndexSet::degree() const { return std::popcount(mask_); }

std::vector<int> IndexSet::indices() const {
  std::vector<int> out;
  for (int j = 0; j < 32; ++j) {
    if (contains(j)) out.push_back(j);
  }
  return out;
}

int merge_sign(IndexSet a, IndexSet b) {
  if ((a.mask() & b.mask()) != 0) return 0;
  int inversions = 0;
  for (int j : b.indices()) {
    const std::uint32_t above = a.mask() & ~((2u << j) - 1u);
    inversions += std::popcount(above);
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

// TrigPolyForm ----------------------------------------------------------------

TrigPolyForm::TrigPolyForm(int dim, int rank) : dim_(dim), rank_(rank) {
  if (dim < 1 || dim > 16) throw DomainError("TrigPolyForm: dim must lie in [1, 16]");
  if (rank < 1) throw DomainError("TrigPolyForm: rank must be >= 1");
}

TrigPolyForm TrigPolyForm::identity(int dim, int rank) {
  return constant(dim, CMatrix::Identity(rank, rank));
}

TrigPolyForm TrigPolyForm::constant(int dim, const CMatrix& m) {
  return monomial(dim, m, Frequency(static_cast<std::size_t>(dim), 0), IndexSet());
}

TrigPolyForm TrigPolyForm::monomial(int dim, const CMatrix& m, Frequency k, IndexSet dx) {
  if (m.rows() != m.cols()) throw ShapeError("TrigPolyForm: coefficient must be square");
  TrigPolyForm out(dim, static_cast<int>(m.rows()));
  out.add_term(k, dx, m);
  return out;
}

TrigPolyForm TrigPolyForm::scalar(int dim, Complex c, Frequency k, IndexSet dx) {
  CMatrix m(1, 1);
  m(0, 0) = c;
  return monomial(dim, m, std::move(k), dx);
}

TrigPolyForm TrigPolyForm::constant_one_form(int dim, std::span<const CMatrix> m) {
  if (static_cast<int>(m.size()) != dim) throw ShapeError("constant_one_form: need one matrix per direction");
  TrigPolyForm out(dim, static_cast<int>(m[0].rows()));
  const Frequency zero(static_cast<std::size_t>(dim), 0);
  for (int j = 0; j < dim; ++j) out.add_term(zero, IndexSet::of({j}), m[j]);
  return out;
}

void TrigPolyForm::add_term(const Frequency& k, IndexSet dx, const CMatrix& m) {
  if (static_cast<int>(k.size()) != dim_) throw ShapeError("add_term: frequency length != dim");
  if (m.rows() != rank_ || m.cols() != rank_) throw ShapeError("add_term: coefficient is not rank x rank");
  if ((dx.mask() >> dim_) != 0) throw DomainError("add_term: index set exceeds torus dimension");
  TermKey key{k, dx};
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    if (!is_zero_matrix(m)) terms_.emplace(std::move(key), m);
    return;
  }
  it->second += m;
  if (is_zero_matrix(it->second)) terms_.erase(it);
}

int TrigPolyForm::max_degree() const {
  int p = -1;
  for (const auto& [key, m] : terms_) p = std::max(p, key.dx.degree());
  return p;
}

bool TrigPolyForm::has_degree_other_than(int p) const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [p](const auto& t) { return t.first.dx.degree() != p; });
}

bool TrigPolyForm::is_constant() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) {
    return std::all_of(t.first.k.begin(), t.first.k.end(), [](int kj) { return kj == 0; });
  });
}

TrigPolyForm TrigPolyForm::degree_part(int p) const {
  TrigPolyForm out(dim_, rank_);
  for (const auto& [key, m] : terms_) {
    if (key.dx.degree() == p) out.terms_.emplace(key, m);
  }
  return out;
}

TrigPolyForm TrigPolyForm::even_part() const {
  TrigPolyForm out(dim_, rank_);
  for (const auto& [key, m] : terms_) {
    if (key.dx.degree() % 2 == 0) out.terms_.emplace(key, m);
  }
  return out;
}

TrigPolyForm TrigPolyForm::odd_part() const {
  TrigPolyForm out(dim_, rank_);
  for (const auto& [key, m] : terms_) {
    if (key.dx.degree() % 2 == 1) out.terms_.emplace(key, m);
  }
  return out;
}

CMatrix TrigPolyForm::coefficient_at(IndexSet dx, std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw ShapeError("coefficient_at: point has wrong dimension");
  CMatrix out = CMatrix::Zero(rank_, rank_);
  for (const auto& [key, m] : terms_) {
    if (key.dx != dx) continue;
    double phase = 0.0;
    for (int j = 0; j < dim_; ++j) phase += key.k[j] * x[j];
    out += std::exp(kTwoPiI * phase) * m;
  }
  return out;
}

CMatrix TrigPolyForm::fourier_coefficient(const Frequency& k, IndexSet dx) const {
  auto it = terms_.find(TermKey{k, dx});
  if (it == terms_.end()) return CMatrix::Zero(rank_, rank_);
  return it->second;
}

double TrigPolyForm::max_abs() const {
  double out = 0.0;
  for (const auto& [key, m] : terms_) {
    if (m.size() > 0) out = std::max(out, m.cwiseAbs().maxCoeff());
  }
  return out;
}

TrigPolyForm TrigPolyForm::pruned(double tol) const {
  TrigPolyForm out(dim_, rank_);
  for (const auto& [key, m] : terms_) {
    if (m.cwiseAbs().maxCoeff() > tol) out.terms_.emplace(key, m);
  }
  return out;
}

TrigPolyForm& TrigPolyForm::operator+=(const TrigPolyForm& other) {
  require_same_shape(*this, other, "operator+");
  for (const auto& [key, m] : other.terms_) add_term(key.k, key.dx, m);
  return *this;
}

TrigPolyForm& TrigPolyForm::operator-=(const TrigPolyForm& other) {
  require_same_shape(*this, other, "operator-");
  for (const auto& [key, m] : other.terms_) add_term(key.k, key.dx, -m);
  return *this;
}

TrigPolyForm& TrigPolyForm::operator*=(Complex s) {
  if (s == Complex(0.0, 0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [key, m] : terms_) m *= s;
  return *this;
}

bool approx_equal(const TrigPolyForm& a, const TrigPolyForm& b, double tol) {
  if (a.dim() != b.dim() || a.rank() != b.rank()) return false;
  return (a - b).max_abs() <= tol;
}

// Algebra -------------------------------------------------------------------

TrigPolyForm wedge(const TrigPolyForm& a, const TrigPolyForm& b) {
  require_same_shape(a, b, "wedge");
  TrigPolyForm out(a.dim(), a.rank());
  for (const auto& [ka, ma] : a.terms()) {
    for (const auto& [kb, mb] : b.terms()) {
      const int sign = merge_sign(ka.dx, kb.dx);
      if (sign == 0) continue;
      CMatrix prod = ma * mb;
      if (sign < 0) prod = -prod;
      out.add_term(add_frequencies(ka.k, kb.k), IndexSet(ka.dx.mask() | kb.dx.mask()), prod);
    }
  }
  return out;
}

TrigPolyForm ext_d(const TrigPolyForm& a) {
  TrigPolyForm out(a.dim(), a.rank());
  for (const auto& [key, m] : a.terms()) {
    for (int j = 0; j < a.dim(); ++j) {
      if (key.k[j] == 0 || key.dx.contains(j)) continue;
      const IndexSet dj = IndexSet::of({j});
      const double sign = merge_sign(dj, key.dx);
      out.add_term(key.k, IndexSet(dj.mask() | key.dx.mask()), (sign * kTwoPiI * double(key.k[j])) * m);
    }
  }
  return out;
}

TrigPolyForm mat_trace(const TrigPolyForm& a) {
  TrigPolyForm out(a.dim(), 1);
  for (const auto& [key, m] : a.terms()) {
    CMatrix t(1, 1);
    t(0, 0) = m.trace();
    out.add_term(key.k, key.dx, t);
  }
  return out;
}

TrigPolyForm dagger(const TrigPolyForm& a) {
  TrigPolyForm out(a.dim(), a.rank());
  for (const auto& [key, m] : a.terms()) {
    Frequency neg(key.k.size());
    std::transform(key.k.begin(), key.k.end(), neg.begin(), [](int kj) { return -kj; });
    out.add_term(neg, key.dx, m.adjoint());
  }
  return out;
}

TrigPolyForm graded_commutator(const TrigPolyForm& a, const TrigPolyForm& b) {
  const int pa = a.max_degree();
  const int pb = b.max_degree();
  if (a.has_degree_other_than(pa) || b.has_degree_other_than(pb)) {
    throw DomainError("graded_commutator: operands must be homogeneous");
  }
  const double sign = ((pa * pb) % 2 == 0) ? 1.0 : -1.0;
  return wedge(a, b) - Complex(sign) * wedge(b, a);
}

TrigPolyForm wedge_power(const TrigPolyForm& a, int n) {
  if (n < 0) throw DomainError("wedge_power: negative exponent");
  TrigPolyForm out = TrigPolyForm::identity(a.dim(), a.rank());
  for (int i = 0; i < n && !out.empty(); ++i) out = wedge(out, a);
  return out;
}

TrigPolyForm nilpotent_series(const TrigPolyForm& a, std::span<const Complex> coeffs) {
  for (const auto& [key, m] : a.terms()) {
    const int p = key.dx.degree();
    if (p == 0 || p % 2 == 1) {
      throw DomainError("nilpotent_series: argument must have only even degree >= 2");
    }
  }
  TrigPolyForm out(a.dim(), a.rank());
  if (coeffs.empty()) return out;
  TrigPolyForm power = TrigPolyForm::identity(a.dim(), a.rank());
  out += coeffs[0] * power;
  for (std::size_t n = 1; n < coeffs.size(); ++n) {
    power = wedge(power, a);
    if (power.empty()) break;
    out += coeffs[n] * power;
  }
  return out;
}

TrigPolyForm exp_nilpotent(const TrigPolyForm& a) {
  // a^n vanishes once 2n > dim.
  std::vector<Complex> coeffs(static_cast<std::size_t>(a.dim() / 2 + 1));
  double factorial = 1.0;
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    if (n > 0) factorial *= double(n);
    coeffs[n] = 1.0 / factorial;
  }
  return nilpotent_series(a, coeffs);
}

TrigPolyForm log_unipotent(const TrigPolyForm& u) {
  TrigPolyForm n = u - TrigPolyForm::identity(u.dim(), u.rank());
  if (n.degree_part(0).max_abs() > kDefaultFormTolerance) {
    throw DomainError("log_unipotent: degree-0 part must be the identity");
  }
  n = n - n.degree_part(0);
  std::vector<Complex> coeffs(static_cast<std::size_t>(u.dim() / 2 + 1));
  for (std::size_t m = 1; m < coeffs.size(); ++m) {
    coeffs[m] = ((m % 2 == 1) ? 1.0 : -1.0) / double(m);
  }
  return nilpotent_series(n, coeffs);
}

Complex sqrt_two_pi_i(SqrtBranch branch) {
  const Complex root = std::sqrt(2.0 * kPi) * std::exp(Complex(0.0, kPi / 4.0));
  return branch == SqrtBranch::principal ? root : -root;
}

TrigPolyForm phi_normalize(const TrigPolyForm& a, SqrtBranch branch) {
  const Complex inv_root = 1.0 / sqrt_two_pi_i(branch);
  TrigPolyForm out(a.dim(), a.rank());
  for (const auto& [key, m] : a.terms()) {
    out.add_term(key.k, key.dx, std::pow(inv_root, key.dx.degree()) * m);
  }
  return out;
}

// Integration -----------------------------------------------------------------

SubTorus SubTorus::full(int dim) { return SubTorus{IndexSet::full(dim), std::vector<double>(dim, 0.0)}; }

SubTorus SubTorus::coordinate(int dim, IndexSet free) {
  return SubTorus{free, std::vector<double>(static_cast<std::size_t>(dim), 0.0)};
}

std::vector<SubTorus> odd_subtori(int dim) {
  std::vector<SubTorus> out;
  for (std::uint32_t mask = 1; mask < (1u << dim); ++mask) {
    if (std::popcount(mask) % 2 == 1) out.push_back(SubTorus::coordinate(dim, IndexSet(mask)));
  }
  std::stable_sort(out.begin(), out.end(), [](const SubTorus& a, const SubTorus& b) {
    return a.free.degree() < b.free.degree();
  });
  return out;
}

CMatrix integrate(const TrigPolyForm& a, const SubTorus& cycle) {
  if (cycle.dim() != a.dim()) throw ShapeError("integrate: cycle lives on a torus of another dimension");
  const int p = cycle.free.degree();
  if (a.has_degree_other_than(p)) {
    throw DomainError("integrate: form has terms of degree other than " + std::to_string(p));
  }
  CMatrix out = CMatrix::Zero(a.rank(), a.rank());
  for (const auto& [key, m] : a.terms()) {
    if (key.dx != cycle.free) continue;
    bool averages_out = false;
    double phase = 0.0;
    for (int j = 0; j < a.dim(); ++j) {
      if (cycle.free.contains(j)) {
        if (key.k[j] != 0) averages_out = true;
      } else {
        phase += key.k[j] * cycle.base[j];
      }
    }
    if (!averages_out) out += std::exp(kTwoPiI * phase) * m;
  }
  return out;
}

Complex integrate_scalar(const TrigPolyForm& a, const SubTorus& cycle) {
  if (a.rank() != 1) throw ShapeError("integrate_scalar: form must have rank 1");
  return integrate(a.degree_part(cycle.free.degree()), cycle)(0, 0);
}

// JSON ------------------------------------------------------------------------

void to_json(nlohmann::json& j, const TrigPolyForm& a) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [key, m] : a.terms()) {
    nlohmann::json re = nlohmann::json::array();
    nlohmann::json im = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      nlohmann::json rr = nlohmann::json::array();
      nlohmann::json ir = nlohmann::json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        rr.push_back(m(r, c).real());
        ir.push_back(m(r, c).imag());
      }
      re.push_back(std::move(rr));
      im.push_back(std::move(ir));
    }
    std::vector<int> idx = key.dx.indices();
    for (int& i : idx) ++i;
    terms.push_back({{"k", key.k}, {"I", idx}, {"re", re}, {"im", im}});
  }
  j = nlohmann::json{{"dim", a.dim()}, {"rank", a.rank()}, {"terms", terms}};
}

namespace {

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& item : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) throw SchemaError(where + ": unknown key '" + item.key() + "'");
  }
}

CMatrix read_matrix(const nlohmann::json& re, const nlohmann::json& im, int rank) {
  auto check = [rank](const nlohmann::json& m) {
    if (!m.is_array() || static_cast<int>(m.size()) != rank) return false;
    return std::all_of(m.begin(), m.end(), [rank](const nlohmann::json& row) {
      return row.is_array() && static_cast<int>(row.size()) == rank &&
             std::all_of(row.begin(), row.end(), [](const nlohmann::json& v) { return v.is_number(); });
    });
  };
  if (!check(re) || !check(im)) throw SchemaError("TrigPolyForm: re/im must be rank x rank numeric arrays");
  CMatrix m(rank, rank);
  for (int r = 0; r < rank; ++r) {
    for (int c = 0; c < rank; ++c) m(r, c) = Complex(re[r][c].get<double>(), im[r][c].get<double>());
  }
  return m;
}

}  // namespace

TrigPolyForm form_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, {"dim", "rank", "terms"}, "TrigPolyForm");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) throw SchemaError("TrigPolyForm: integer 'dim' required");
  if (!j.contains("rank") || !j["rank"].is_number_integer()) throw SchemaError("TrigPolyForm: integer 'rank' required");
  const int dim = j["dim"].get<int>();
  const int rank = j["rank"].get<int>();
  if (dim < 1 || dim > 16 || rank < 1) throw SchemaError("TrigPolyForm: dim must lie in [1,16] and rank >= 1");
  TrigPolyForm out(dim, rank);
  if (!j.contains("terms")) return out;
  if (!j["terms"].is_array()) throw SchemaError("TrigPolyForm: 'terms' must be an array");
  for (const auto& t : j["terms"]) {
    reject_unknown_keys(t, {"k", "I", "re", "im"}, "TrigPolyForm term");
    if (!t.contains("k") || !t["k"].is_array() || static_cast<int>(t["k"].size()) != dim) {
      throw SchemaError("TrigPolyForm term: 'k' must have dim integer entries");
    }
    Frequency k;
    for (const auto& v : t["k"]) {
      if (!v.is_number_integer()) throw SchemaError("TrigPolyForm term: 'k' entries must be integers");
      k.push_back(v.get<int>());
    }
    std::vector<int> idx;
    if (t.contains("I")) {
      if (!t["I"].is_array()) throw SchemaError("TrigPolyForm term: 'I' must be an array");
      for (const auto& v : t["I"]) {
        if (!v.is_number_integer()) throw SchemaError("TrigPolyForm term: 'I' entries must be integers");
        const int i = v.get<int>();
        if (i < 1 || i > dim) throw SchemaError("TrigPolyForm term: index out of range 1..dim");
        if (!idx.empty() && i <= idx.back() + 1) throw SchemaError("TrigPolyForm term: 'I' must be strictly ascending");
        idx.push_back(i - 1);
      }
    }
    if (!t.contains("re") || !t.contains("im")) throw SchemaError("TrigPolyForm term: 're' and 'im' required");
    out.add_term(k, IndexSet::of(idx), read_matrix(t["re"], t["im"], rank));
  }
  return out;
}

}  // namespace flateta
