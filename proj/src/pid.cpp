#include "amem/pid.hpp"

#include <json.hpp>

namespace amem {

double entropy(std::span<const double> marginal) {
  if (marginal.empty()) throw DimensionError("entropy of an empty distribution");
  double total = 0.0;
  for (double p : marginal) {
    if (!std::isfinite(p) || p < 0.0) throw NormalizationError("entropy: negative or non-finite probability");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw NormalizationError("entropy: probabilities do not sum to 1");
  double h = 0.0;
  for (double p : marginal) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

std::string dump_joint_record(const JointDistribution<double>& joint) {
  const PidReport<double> r = pid_report(joint);
  nlohmann::ordered_json j;
  nlohmann::json tensor = nlohmann::json::array();
  for (std::size_t y = 0; y < 2; ++y) {
    nlohmann::json plane = nlohmann::json::array();
    for (std::size_t a = 0; a < joint.n_r(); ++a) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t b = 0; b < joint.n_t(); ++b) row.push_back(joint(y, a, b));
      plane.push_back(std::move(row));
    }
    tensor.push_back(std::move(plane));
  }
  j["joint"] = std::move(tensor);
  j["isx"] = {{"R|T", r.isx[0]}, {"R", r.isx[1]}, {"T", r.isx[2]}, {"RT", r.isx[3]}};
  j["atoms"] = {{"unq_R", r.atoms.unq_r}, {"unq_T", r.atoms.unq_t}, {"red", r.atoms.red},
                {"syn", r.atoms.syn},     {"res", r.atoms.res}};
  j["mi"] = {{"Y:R", mutual_information(joint, SourceSet::kR)},
             {"Y:T", mutual_information(joint, SourceSet::kT)},
             {"Y:RT", mutual_information(joint, SourceSet::kRT)}};
  j["H_Y"] = r.h_y;
  return j.dump(2);
}

}  // namespace amem
