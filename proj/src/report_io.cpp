#include "polymer_lab/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace plab {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_replicas_csv(std::ostream& out, int d, const std::vector<GridPointRun>& runs) {
  out << kReplicaCsvHeader << '\n';
  for (const auto& run : runs) {
    for (const auto& r : run.replicas) {
      out << r.replica_id << ',' << r.seed << ',' << d << ',' << run.N << ',' << format_double(run.c) << ','
          << format_double(r.Z) << ',' << format_double(r.K) << ',' << format_double(r.msd) << ','
          << format_double(r.linear) << ',' << format_double(r.remainder) << '\n';
    }
  }
}

std::string replicas_csv(int d, const std::vector<GridPointRun>& runs) {
  std::ostringstream os;
  write_replicas_csv(os, d, runs);
  return os.str();
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["dim"] = c.d;
  j["eps"] = c.eps;
  j["N"] = c.grid;
  j["replicas"] = c.replicas;
  j["seed"] = c.master_seed;
  j["eps_prob"] = c.eps_prob;
  j["c"] = c.c_override ? Json(*c.c_override) : Json(nullptr);
  return j;
}

Json to_json(const DistributionStats& s) {
  return Json{{"count", s.count},
              {"mean", s.mean},
              {"variance", s.variance},
              {"skewness", s.skewness},
              {"excess_kurtosis", s.excess_kurtosis},
              {"ks", s.ks},  // NaN serialises as null
              {"degenerate", s.degenerate}};
}

Json to_json(const NormalityStats& s) {
  return Json{{"N", s.N},
              {"a", s.a},
              {"sigma2_target", s.sigma2_target},
              {"enough_replicas", s.enough_replicas},
              {"scaled", to_json(s.scaled)},
              {"linear", to_json(s.linear)},
              {"remainder", to_json(s.remainder)},
              {"remainder_sq", to_json(s.remainder_sq)}};
}

Json to_json(const ConcentrationStats& s) {
  return Json{{"N", s.N},
              {"replicas", s.replicas},
              {"eps_prob", s.eps_prob},
              {"exceedance", s.exceedance},
              {"exceedance_stderr", s.exceedance_stderr},
              {"var_Z", s.var_z},
              {"var_K", s.var_k},
              {"eps_split", s.split},
              {"chebyshev_bound", s.chebyshev_bound},
              {"violation", s.violation}};
}

Json to_json(const ZMomentStats& s) {
  return Json{{"mean_Z", s.mean},
              {"mean_Z_stderr", s.mean_stderr},
              {"var_Z", s.variance},
              {"var_Z_stderr", s.variance_stderr},
              {"mean_msd_over_N", s.msd_over_n_mean},
              {"var_msd_over_N", s.msd_over_n_variance}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  f.flush();
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace plab
