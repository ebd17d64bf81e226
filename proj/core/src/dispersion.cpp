#include "nlsregime/dispersion.hpp"

#include <algorithm>
#include <boost/math/special_functions/binomial.hpp>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "nlsregime/hill.hpp"
#include "nlsregime/susceptibility.hpp"

namespace nlsr {

namespace {

constexpr double kJetStep = 1e-3 * kTwoPi;

// 5-point stencils: orders 1, 2 are O(h^4), orders 3, 4 are O(h^2).
template <class F>
double stencil(const F& f, double k, int order, double h) {
  const double fm2 = f(k - 2 * h), fm1 = f(k - h), fp1 = f(k + h), fp2 = f(k + 2 * h);
  switch (order) {
    case 1: return (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h);
    case 2: return (-fp2 + 16 * fp1 - 30 * f(k) + 16 * fm1 - fm2) / (12 * h * h);
    case 3: return (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * h * h * h);
    case 4: return (fp2 - 4 * fp1 + 6 * f(k) - 4 * fm1 + fm2) / (h * h * h * h);
    default: return f(k);
  }
}

std::string canonical_family(const std::string& name) {
  if (name == "2-cos" || name == "2−cos" || name == "2-cos(k)" || name == "trig") return "2-cos";
  if (name == "sqrt" || name == "sqrt(1+k^2)" || name == "sqrt(1+k²)" || name == "relativistic")
    return "sqrt";
  if (name == "cospoly" || name == "poly-cos" || name == "polynomial") return "cospoly";
  if (name == "k2" || name == "k^2/2" || name == "k²/2" || name == "quadratic") return "k2";
  if (name == "custom") return "custom";
  throw Error("unknown dispersion family '" + name +
              "' (valid: 2-cos, sqrt, cospoly, k2, custom)");
}

// cos^j k expanded as a cosine series sum_p A_p cos(p k).
rvec cos_series(const rvec& c) {
  const int deg = static_cast<int>(c.size()) - 1;
  rvec A(std::max(deg, 0) + 1, 0.0);
  for (int j = 0; j <= deg; ++j) {
    const double s = std::ldexp(1.0, -j);
    for (int r = 0; r <= j; ++r) {
      const int p = std::abs(j - 2 * r);
      A[p] += c[j] * s * boost::math::binomial_coefficient<double>(j, r);
    }
  }
  return A;
}

}  // namespace

double BandStructure::derivative(int band, double k, int order) const {
  if (order == 0) return omega(band, k);
  return stencil([&](double x) { return omega(band, x); }, k, order, kJetStep);
}

mp50 BandStructure::omega_hp(int band, const mp50& k) const {
  return mp50(omega(band, static_cast<double>(k)));
}

FamilySpec family_from_json(const nlohmann::json& j) {
  FamilySpec f;
  f.family = canonical_family(j.at("family").get<std::string>());
  const nlohmann::json p = j.contains("params") ? j.at("params") : nlohmann::json::object();
  if (p.contains("mass")) f.mass = p.at("mass").get<double>();
  if (p.contains("m")) f.mass = p.at("m").get<double>();
  if (p.contains("a")) f.a = p.at("a").get<double>();
  if (p.contains("coeffs")) f.coeffs = p.at("coeffs").get<rvec>();
  if (f.family == "cospoly" && f.coeffs.empty()) throw Error("cospoly family needs params.coeffs");
  if (f.family == "custom") throw Error("custom family is API-only");
  return f;
}

nlohmann::json family_to_json(const FamilySpec& f) {
  nlohmann::json p = nlohmann::json::object();
  if (f.family == "sqrt") p["mass"] = f.mass;
  if (f.family == "k2") p["a"] = f.a;
  if (f.family == "cospoly") p["coeffs"] = f.coeffs;
  return {{"family", f.family}, {"params", p}};
}

SyntheticBands::SyntheticBands(std::vector<FamilySpec> bands) : bands_(std::move(bands)) {
  for (auto& b : bands_) {
    b.family = canonical_family(b.family);
    if (b.family == "custom" && !b.custom) throw Error("custom family without callable");
  }
}

double SyntheticBands::omega(int band, double k) const {
  const FamilySpec& f = family(band);
  if (f.family == "2-cos") return 2.0 - std::cos(k);
  if (f.family == "sqrt") return std::sqrt(f.mass * f.mass + k * k);
  if (f.family == "k2") return f.a * k * k;
  if (f.family == "cospoly") {
    double c = std::cos(k), acc = 0.0;
    for (auto it = f.coeffs.rbegin(); it != f.coeffs.rend(); ++it) acc = acc * c + *it;
    return acc;
  }
  return f.custom(k);
}

bool SyntheticBands::analytic_derivatives(int band) const { return family(band).family != "custom"; }

double SyntheticBands::derivative(int band, double k, int order) const {
  const FamilySpec& f = family(band);
  if (order == 0) return omega(band, k);
  if (f.family == "custom" || order > 4) return BandStructure::derivative(band, k, order);
  if (f.family == "2-cos") {
    const double s = std::sin(k), c = std::cos(k);
    const double d[5] = {2 - c, s, c, -s, -c};
    return d[order];
  }
  if (f.family == "sqrt") {
    const double m2 = f.mass * f.mass, s = m2 + k * k, r = std::sqrt(s);
    switch (order) {
      case 1: return k / r;
      case 2: return m2 / (s * r);
      case 3: return -3 * m2 * k / (s * s * r);
      default: return m2 * (12 * k * k - 3 * m2) / (s * s * s * r);
    }
  }
  if (f.family == "k2") {
    const double d[5] = {f.a * k * k, 2 * f.a * k, 2 * f.a, 0.0, 0.0};
    return d[order];
  }
  const rvec A = cos_series(f.coeffs);
  double acc = 0.0;
  for (size_t p = 0; p < A.size(); ++p)
    acc += A[p] * std::pow(static_cast<double>(p), order) * std::cos(p * k + order * kPi / 2);
  return acc;
}

bool SyntheticBands::has_hp() const {
  return std::none_of(bands_.begin(), bands_.end(),
                      [](const FamilySpec& f) { return f.family == "custom"; });
}

mp50 SyntheticBands::omega_hp(int band, const mp50& k) const {
  const FamilySpec& f = family(band);
  using boost::multiprecision::cos;
  using boost::multiprecision::sqrt;
  if (f.family == "2-cos") return mp50(2) - cos(k);
  if (f.family == "sqrt") return sqrt(mp50(f.mass) * f.mass + k * k);
  if (f.family == "k2") return mp50(f.a) * k * k;
  if (f.family == "cospoly") {
    mp50 c = cos(k), acc = 0;
    for (auto it = f.coeffs.rbegin(); it != f.coeffs.rend(); ++it) acc = acc * c + *it;
    return acc;
  }
  return BandStructure::omega_hp(band, k);
}

DispersionModel::DispersionModel(std::shared_ptr<const BandStructure> bands, Provenance p)
    : bands_(std::move(bands)), provenance_(p) {}

const Susceptibility& DispersionModel::overlap() const {
  if (!overlap_) throw Error("dispersion model has no susceptibility provider");
  return *overlap_;
}

void DispersionModel::sample(int n_k) {
  k_grid.assign(n_k, 0.0);
  table.assign(n_bands(), rvec(n_k));
  for (int i = 0; i < n_k; ++i) k_grid[i] = -kPi + kTwoPi * i / n_k;
  if (const HillSolver* h = hill()) {
    for (int i = 0; i < n_k; ++i) {
      const auto sol = h->solve(k_grid[i]);
      for (int n = 0; n < n_bands(); ++n) table[n][i] = sol.omega[n];
    }
    return;
  }
  for (int n = 0; n < n_bands(); ++n)
    for (int i = 0; i < n_k; ++i) table[n][i] = omega(n + 1, k_grid[i]);
}

const HillSolver* DispersionModel::hill() const {
  return dynamic_cast<const HillSolver*>(bands_.get());
}

nlohmann::json DispersionModel::describe() const {
  nlohmann::json j;
  j["provenance"] = provenance_ == Provenance::synthetic ? "synthetic" : "hill-solver";
  j["n_bands"] = n_bands();
  if (auto* s = dynamic_cast<const SyntheticBands*>(bands_.get())) {
    j["bands"] = nlohmann::json::array();
    for (int n = 1; n <= n_bands(); ++n) j["bands"].push_back(family_to_json(s->family(n)));
  }
  if (const HillSolver* h = hill()) {
    j["potential"] = h->eps().to_json();
    j["plane_waves"] = h->options().plane_waves;
    j["normalization"] = "int eps |p|^2 = 1";
  }
  if (overlap_) j["susceptibility"] = overlap_->describe();
  j["q5"] = q5 ? nlohmann::json(*q5) : nlohmann::json(nullptr);
  return j;
}

DispersionModel make_synthetic(std::vector<FamilySpec> bands,
                               std::shared_ptr<const Susceptibility> overlap, int n_validate) {
  if (bands.empty()) throw Error("make_synthetic: no bands");
  auto sb = std::make_shared<SyntheticBands>(std::move(bands));
  for (int i = 0; i < n_validate; ++i) {
    const double k = -kPi + kTwoPi * i / (n_validate - 1);
    double prev = 0.0;
    for (int n = 1; n <= sb->n_bands(); ++n) {
      const double w = sb->omega(n, k), wm = sb->omega(n, -k);
      if (std::abs(w - wm) > 1e-12 * std::max(1.0, std::abs(w)))
        throw Error("make_synthetic: band " + std::to_string(n) + " is not even in k");
      if (w < prev - 1e-12)
        throw Error("make_synthetic: band ordering 0 <= omega_n <= omega_{n+1} violated at band " +
                    std::to_string(n));
      prev = w;
    }
  }
  DispersionModel m(sb, Provenance::synthetic);
  if (!overlap) {
    overlap = std::make_shared<SeparableSusceptibility>(sb, SeparableSusceptibility::Params{});
  }
  m.set_overlap(std::move(overlap));
  m.sample(256);
  return m;
}

DispersionModel model_from_json(const nlohmann::json& j) {
  if (j.contains("potential")) {
    const auto pot = PiecewiseProfile::from_json(j.at("potential"));
    HillSolver::Options opt;
    if (j.contains("plane_waves")) opt.plane_waves = j.at("plane_waves").get<int>();
    DispersionModel m = hill_bands(pot, j.value("n_bands", 4), j.value("n_k", 64), opt);
    if (j.contains("susceptibility")) {
      m.set_overlap(susceptibility_from_json(j.at("susceptibility"), m.bands_ptr()));
    } else {
      const PiecewiseProfile chi3 =
          j.contains("chi3") ? PiecewiseProfile::from_json(j.at("chi3")) : PiecewiseProfile{};
      auto hs = std::dynamic_pointer_cast<const HillSolver>(m.bands_ptr());
      m.set_overlap(std::make_shared<HillOverlap>(hs, chi3, j.value("wrap_overlap", false)));
    }
    if (j.contains("q5") && !j.at("q5").is_null()) m.q5 = j.at("q5").get<double>();
    return m;
  }
  std::vector<FamilySpec> fams;
  if (j.contains("bands")) {
    for (const auto& b : j.at("bands")) fams.push_back(family_from_json(b));
  } else {
    fams.push_back(family_from_json(j));
  }
  auto sb = std::make_shared<SyntheticBands>(fams);
  std::shared_ptr<const Susceptibility> sus;
  if (j.contains("susceptibility")) sus = susceptibility_from_json(j.at("susceptibility"), sb);
  DispersionModel m = make_synthetic(fams, sus);
  if (j.contains("q5") && !j.at("q5").is_null()) m.q5 = j.at("q5").get<double>();
  return m;
}

double TaylorJet::gamma(int j) const {
  static const double fact[5] = {1, 1, 2, 6, 24};
  return derivs.at(j) / fact[j];
}

TaylorJet jet_at(const DispersionModel& model, int n0, double k_star, int order) {
  if (order < 1 || order > 4) throw Error("jet_at: order must be 1..4");
  if (n0 < 1 || n0 > model.n_bands()) throw Error("jet_at: band index out of range");
  TaylorJet jet;
  jet.k_star = k_star;
  jet.n0 = n0;
  jet.order = order;
  const BandStructure& b = model.bands();
  if (b.analytic_derivatives(n0)) {
    for (int j = 0; j <= 4; ++j) jet.derivs[j] = b.derivative(n0, k_star, j);
  } else {
    const double h = kJetStep;
    if (std::abs(k_star) + 8 * h >= kPi) throw Error("jet_at: finite-difference stencil leaves the zone");
    auto f = [&](double x) { return b.omega(n0, x); };
    jet.derivs[0] = f(k_star);
    for (int j = 1; j <= 4; ++j) {
      const double d1 = stencil(f, k_star, j, h), d2 = stencil(f, k_star, j, 2 * h),
                   d4 = stencil(f, k_star, j, 4 * h);
      const double p = (j <= 2) ? 16.0 : 4.0, q = (j <= 2) ? 64.0 : 16.0;
      const double r1 = (p * d1 - d2) / (p - 1), r2 = (p * d2 - d4) / (p - 1);
      jet.derivs[j] = (q * r1 - r2) / (q - 1);
      jet.errors[j] = std::abs(jet.derivs[j] - r1) + 1e-14 * std::pow(h, -j);
    }
  }
  // degenerate neighbours invalidate the Taylor machinery
  double gap = std::numeric_limits<double>::infinity();
  for (int n = std::max(1, n0 - 1); n <= std::min(model.n_bands(), n0 + 1); ++n) {
    if (n == n0) continue;
    for (double dk : {-4 * kJetStep, 0.0, 4 * kJetStep})
      gap = std::min(gap, std::abs(model.omega(n, k_star + dk) - model.omega(n0, k_star + dk)));
  }
  if (gap < 1e-6) {
    jet.valid = false;
    jet.note = "degenerate band neighbourhood (gap " + std::to_string(gap) + ")";
  }
  return jet;
}

const GenericityItem& GenericityReport::item(const std::string& name) const {
  for (const auto& it : items)
    if (it.name == name) return it;
  throw Error("genericity item not found: " + name);
}

nlohmann::json GenericityReport::to_json() const {
  nlohmann::json j;
  j["generic"] = generic;
  for (const auto& it : items) j["items"].push_back({{"name", it.name}, {"margin", it.margin}, {"pass", it.pass}});
  return j;
}

GenericityReport check_generic(const DispersionModel& model, int n0, double k_star, double tol) {
  GenericityReport r;
  auto add = [&](std::string name, double margin) {
    r.items.push_back({std::move(name), margin, margin > tol});
  };
  const double k3 = wrap_zone(3 * k_star);
  const double w0 = model.omega(n0, k_star);
  const double w1 = model.derivative(n0, k_star, 1);
  add("modpi", std::abs(wrap_zone(2 * k_star)));
  for (int n = 1; n <= model.n_bands(); ++n) {
    const std::string s = std::to_string(n);
    add("3om_n" + s, std::abs(3 * w0 - model.omega(n, k3)));
    const double v3 = model.derivative(n, k3, 1);
    add("gv3_minus_n" + s, std::abs(w1 - v3));
    add("gv3_plus_n" + s, std::abs(w1 + v3));
    if (n != n0) {
      add("band_sep_n" + s, std::abs(w0 - model.omega(n, k_star)));
      add("gv_sep_n" + s, std::min(std::abs(w1 - model.derivative(n, k_star, 1)),
                                   std::abs(w1 - model.derivative(n, -k_star, 1))));
    }
  }
  add("omega", std::abs(w0));
  add("omega_prime", std::abs(w1));
  add("omega_second", std::abs(model.derivative(n0, k_star, 2)));
  for (const auto& it : r.items) r.generic = r.generic && it.pass;
  return r;
}

void write_band_csv(const DispersionModel& model, std::ostream& os) {
  os << "k";
  for (int n = 1; n <= model.n_bands(); ++n) os << ",omega_" << n;
  os << "\n" << std::setprecision(17);
  for (size_t i = 0; i < model.k_grid.size(); ++i) {
    os << model.k_grid[i];
    for (int n = 0; n < model.n_bands(); ++n) os << "," << model.table[n][i];
    os << "\n";
  }
}

}  // namespace nlsr
