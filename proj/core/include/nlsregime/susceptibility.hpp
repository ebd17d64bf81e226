#pragma once

#include <array>
#include <functional>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>

#include "nlsregime/common.hpp"
#include "nlsregime/dispersion.hpp"

namespace nlsr {

struct ModeIndex {
  int sign = 1;  // frequency sign
  int band = 1;
  double k = 0.0;
};

using Origins = std::array<ModeIndex, 3>;
using Multi3 = std::array<int, 3>;

// Modal susceptibility Q(n, k) for an end mode and three origin modes. The optional
// multi-index l selects the time-harmonic coefficient chi_l of each origin slot;
// l = (0,0,0) is the plain value.
class Susceptibility {
 public:
  virtual ~Susceptibility() = default;
  virtual cplx value(const ModeIndex& end, const Origins& o, const Multi3& l = {0, 0, 0}) const = 0;
  virtual const class SeparableSusceptibility* separable() const { return nullptr; }
  virtual nlohmann::json describe() const = 0;
};

// Q = E(end) * O(o1, l1) * O(o2, l2) * O(o3, l3).
//   exponential:    E = (2pi)^-2 (-i s_end) w_end s R0 G(k),  O = G(k) (-1)^l / (c - i s w(k))^(l+1)
//   instantaneous:  same E, O = G(k) for l = 0 and 0 otherwise
//   constant:       E = -i s_end q0, O = 1 for l = 0 and 0 otherwise
// with G(k) = 1 + g1 cos k and w_end = omega_n(k_end) (or 1 when omega_end is off).
class SeparableSusceptibility : public Susceptibility {
 public:
  struct Params {
    std::string kernel = "exponential";
    double c = 4.0;
    double R0 = 64.0;
    double strength = -0.35;
    double g1 = 0.3;
    bool omega_end = true;
    double q0 = 1.0;
  };

  SeparableSusceptibility(std::shared_ptr<const BandStructure> bands, Params p);

  cplx value(const ModeIndex& end, const Origins& o, const Multi3& l = {0, 0, 0}) const override;
  const SeparableSusceptibility* separable() const override { return this; }
  nlohmann::json describe() const override;

  cplx end_factor(int sign, int band, double k) const;
  cplx origin_factor(int sign, int band, double k, int l) const;
  const Params& params() const { return p_; }

 private:
  std::shared_ptr<const BandStructure> bands_;
  Params p_;
};

std::shared_ptr<SeparableSusceptibility> make_constant_susceptibility(double q0);

// Wraps a user function; must be smooth and even.
class CallableSusceptibility : public Susceptibility {
 public:
  using Fn = std::function<cplx(const ModeIndex&, const Origins&, const Multi3&)>;
  explicit CallableSusceptibility(Fn f, std::string label = "callable")
      : f_(std::move(f)), label_(std::move(label)) {}
  cplx value(const ModeIndex& end, const Origins& o, const Multi3& l = {0, 0, 0}) const override {
    return f_(end, o, l);
  }
  nlohmann::json describe() const override { return {{"kind", label_}}; }

 private:
  Fn f_;
  std::string label_;
};

std::shared_ptr<const Susceptibility> susceptibility_from_json(
    const nlohmann::json& j, std::shared_ptr<const BandStructure> bands);

}  // namespace nlsr
