#include "nlsregime/susceptibility.hpp"

#include <cmath>

namespace nlsr {

SeparableSusceptibility::SeparableSusceptibility(std::shared_ptr<const BandStructure> bands, Params p)
    : bands_(std::move(bands)), p_(std::move(p)) {
  if (p_.kernel != "exponential" && p_.kernel != "instantaneous" && p_.kernel != "constant")
    throw Error("unknown susceptibility kernel '" + p_.kernel +
                "' (valid: exponential, instantaneous, constant)");
  if (p_.kernel != "constant" && !bands_) throw Error("separable susceptibility needs bands");
}

cplx SeparableSusceptibility::end_factor(int sign, int band, double k) const {
  if (p_.kernel == "constant") return -kI * double(sign) * p_.q0;
  const double w = p_.omega_end ? bands_->omega(band, k) : 1.0;
  return -kI * double(sign) * w * p_.strength * p_.R0 * (1.0 + p_.g1 * std::cos(k)) /
         (kTwoPi * kTwoPi);
}

cplx SeparableSusceptibility::origin_factor(int sign, int band, double k, int l) const {
  if (p_.kernel == "constant") return l == 0 ? cplx(1.0) : cplx(0.0);
  const double g = 1.0 + p_.g1 * std::cos(k);
  if (p_.kernel == "instantaneous") return l == 0 ? cplx(g) : cplx(0.0);
  const cplx d = p_.c - kI * double(sign) * bands_->omega(band, k);
  return g * ((l % 2) ? -1.0 : 1.0) / std::pow(d, l + 1);
}

cplx SeparableSusceptibility::value(const ModeIndex& end, const Origins& o, const Multi3& l) const {
  cplx v = end_factor(end.sign, end.band, end.k);
  for (int i = 0; i < 3; ++i) v *= origin_factor(o[i].sign, o[i].band, o[i].k, l[i]);
  return v;
}

nlohmann::json SeparableSusceptibility::describe() const {
  nlohmann::json j{{"kind", "separable"}, {"kernel", p_.kernel}};
  if (p_.kernel == "constant") {
    j["q0"] = p_.q0;
  } else {
    j["c"] = p_.c;
    j["R0"] = p_.R0;
    j["strength"] = p_.strength;
    j["g1"] = p_.g1;
    j["omega_end"] = p_.omega_end;
  }
  return j;
}

std::shared_ptr<SeparableSusceptibility> make_constant_susceptibility(double q0) {
  SeparableSusceptibility::Params p;
  p.kernel = "constant";
  p.q0 = q0;
  return std::make_shared<SeparableSusceptibility>(nullptr, p);
}

std::shared_ptr<const Susceptibility> susceptibility_from_json(
    const nlohmann::json& j, std::shared_ptr<const BandStructure> bands) {
  SeparableSusceptibility::Params p;
  const std::string type = j.value("type", std::string("separable"));
  if (type == "constant") {
    p.kernel = "constant";
    p.q0 = j.value("q0", 1.0);
    return std::make_shared<SeparableSusceptibility>(nullptr, p);
  }
  if (type != "separable") throw Error("unknown susceptibility type '" + type + "' (valid: separable, constant)");
  p.kernel = j.value("kernel", p.kernel);
  p.c = j.value("c", p.c);
  p.R0 = j.value("R0", p.c * p.c * p.c);
  p.strength = j.value("strength", p.strength);
  p.g1 = j.value("g1", p.g1);
  p.omega_end = j.value("omega_end", p.omega_end);
  return std::make_shared<SeparableSusceptibility>(std::move(bands), p);
}

}  // namespace nlsr
