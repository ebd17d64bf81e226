#pragma once

#include <array>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <functional>
#include <iosfwd>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "nlsregime/common.hpp"

namespace nlsr {

using mp50 = boost::multiprecision::cpp_bin_float_50;

// Band frequencies omega_n(k), n = 1..n_bands, on the zone [-pi, pi].
class BandStructure {
 public:
  virtual ~BandStructure() = default;
  virtual int n_bands() const = 0;
  virtual double omega(int band, double k) const = 0;
  virtual bool analytic_derivatives(int /*band*/) const { return false; }
  // Analytic where available, otherwise a 5-point central difference.
  virtual double derivative(int band, double k, int order) const;
  virtual bool has_hp() const { return false; }
  virtual mp50 omega_hp(int band, const mp50& k) const;
};

// Built-in even families.
//   "2-cos"    omega = 2 - cos k
//   "sqrt"     omega = sqrt(m^2 + k^2)
//   "cospoly"  omega = sum_j c_j cos^j k
//   "k2"       omega = a k^2 (default a = 1/2)
//   "custom"   user callable, derivatives by finite differences
struct FamilySpec {
  std::string family = "2-cos";
  double mass = 1.0;
  double a = 0.5;
  rvec coeffs;
  std::function<double(double)> custom;
};

FamilySpec family_from_json(const nlohmann::json& j);
nlohmann::json family_to_json(const FamilySpec& f);

class SyntheticBands : public BandStructure {
 public:
  explicit SyntheticBands(std::vector<FamilySpec> bands);
  int n_bands() const override { return static_cast<int>(bands_.size()); }
  double omega(int band, double k) const override;
  bool analytic_derivatives(int band) const override;
  double derivative(int band, double k, int order) const override;
  bool has_hp() const override;
  mp50 omega_hp(int band, const mp50& k) const override;
  const FamilySpec& family(int band) const { return bands_.at(band - 1); }

 private:
  std::vector<FamilySpec> bands_;
};

class Susceptibility;
class HillSolver;

enum class Provenance { synthetic, hill };

class DispersionModel {
 public:
  DispersionModel(std::shared_ptr<const BandStructure> bands, Provenance p);

  int n_bands() const { return bands_->n_bands(); }
  double omega(int band, double k) const { return bands_->omega(band, k); }
  double derivative(int band, double k, int order) const { return bands_->derivative(band, k, order); }
  const BandStructure& bands() const { return *bands_; }
  std::shared_ptr<const BandStructure> bands_ptr() const { return bands_; }
  Provenance provenance() const { return provenance_; }

  const Susceptibility& overlap() const;
  std::shared_ptr<const Susceptibility> overlap_ptr() const { return overlap_; }
  void set_overlap(std::shared_ptr<const Susceptibility> s) { overlap_ = std::move(s); }

  // Fifth-order constant kernel strength q5; Q5 = 0 when absent.
  std::optional<double> q5;

  // Sampled band table on a uniform k-grid (filled by the constructors).
  rvec k_grid;
  std::vector<rvec> table;  // table[n-1][i] = omega_n(k_grid[i])
  void sample(int n_k);

  const HillSolver* hill() const;
  nlohmann::json describe() const;

 private:
  std::shared_ptr<const BandStructure> bands_;
  std::shared_ptr<const Susceptibility> overlap_;
  Provenance provenance_;
};

// Validates evenness (1e-12) and ordering 0 <= omega_n <= omega_{n+1} on a grid.
DispersionModel make_synthetic(std::vector<FamilySpec> bands,
                               std::shared_ptr<const Susceptibility> overlap = nullptr,
                               int n_validate = 257);

// JSON forms: {"family":..,"params":{..}}, {"bands":[..]}, or
// {"potential":{"piecewise":[[r0,v0],..]}, "n_bands":.., "n_k":..}.
// Optional keys: "susceptibility", "q5".
DispersionModel model_from_json(const nlohmann::json& j);

struct TaylorJet {
  double k_star = 0.0;
  int n0 = 1;
  int order = 4;
  std::array<double, 5> derivs{};  // omega^{(j)}(k_star)
  std::array<double, 5> errors{};  // estimated absolute error per derivative
  bool valid = true;
  std::string note;
  double gamma(int j) const;  // derivs[j] / j!
};

// Analytic for synthetic families; otherwise 5-point stencils at h = 1e-3 * 2 pi with
// two Richardson levels (h, 2h, 4h). Jets next to a degenerate band (gap < 1e-6) are
// flagged invalid.
TaylorJet jet_at(const DispersionModel& model, int n0, double k_star, int order = 4);

struct GenericityItem {
  std::string name;
  double margin = 0.0;
  bool pass = false;
};

struct GenericityReport {
  std::vector<GenericityItem> items;
  bool generic = true;
  const GenericityItem& item(const std::string& name) const;
  nlohmann::json to_json() const;
};

GenericityReport check_generic(const DispersionModel& model, int n0, double k_star,
                               double tol = 1e-8);

// CSV: k, omega_1..omega_N
void write_band_csv(const DispersionModel& model, std::ostream& os);

}  // namespace nlsr
