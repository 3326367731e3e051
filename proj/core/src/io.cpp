#include "urnnet/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "urnnet/error.hpp"

namespace urnnet {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  if (ec != std::errc{}) throw Error(ErrorCode::Io, "double formatting failed");
  return std::string(buf, end);
}

Mat parse_matrix_text(const std::string& text) {
  std::istringstream in(text);
  std::size_t n = 0;
  if (!(in >> n) || n == 0)
    throw Error(ErrorCode::Io, "matrix text must start with a positive agent count");
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(in >> m(i, j)))
        throw Error(ErrorCode::Io, "matrix text ended early", i, j);
  double extra;
  if (in >> extra) throw Error(ErrorCode::Io, "matrix text has trailing numbers");
  return m;
}

std::string matrix_text(const Mat& m) {
  std::string out = std::to_string(m.rows);
  out.push_back('\n');
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (j > 0) out.push_back(' ');
      out += format_double(m(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

Mat load_matrix_file(const std::string& path) { return parse_matrix_text(read_text_file(path)); }

std::string trajectory_csv(const Trajectory& t) {
  std::string out = "step,agent,z\n";
  for (std::size_t s = 0; s < t.sample_steps.size(); ++s)
    for (std::size_t i = 0; i < t.samples[s].size(); ++i) {
      out += std::to_string(t.sample_steps[s]);
      out.push_back(',');
      out += std::to_string(i);
      out.push_back(',');
      out += format_double(t.samples[s][i]);
      out.push_back('\n');
    }
  return out;
}

std::string trajectory_json(const Trajectory& t) {
  json j;
  j["seed"] = t.seed;
  j["n_steps"] = t.n_steps;
  json samples = json::array();
  for (std::size_t s = 0; s < t.sample_steps.size(); ++s) {
    json e;
    e["step"] = t.sample_steps[s];
    e["z"] = t.samples[s];
    samples.push_back(std::move(e));
  }
  j["samples"] = std::move(samples);
  j["final"] = t.final_state;
  return j.dump(2) + "\n";
}

std::string finals_csv(const EnsembleStats& stats) {
  std::string out = "run,agent,z_final\n";
  for (const auto& run : stats.runs)
    for (std::size_t i = 0; i < run.final_state.size(); ++i) {
      out += std::to_string(run.run_index);
      out.push_back(',');
      out += std::to_string(i);
      out.push_back(',');
      out += format_double(run.final_state[i]);
      out.push_back('\n');
    }
  return out;
}

namespace {

json prediction_json(const LimitPrediction& p) {
  json j;
  j["kind"] = limit_kind_name(p.kind);
  switch (p.kind) {
    case LimitKind::DeterministicHalf:
    case LimitKind::DeterministicPoint:
      j["point"] = p.point;
      break;
    case LimitKind::RandomAntiSynchronized:
      j["partition_i"] = p.partition->first;
      j["partition_j"] = p.partition->second;
      break;
    case LimitKind::RandomSynchronized:
      break;
    case LimitKind::AffineOfLowerLevels: {
      j["constant"] = p.constant;
      json terms = json::array();
      for (const auto& t : p.terms) {
        json term;
        term["class_id"] = t.class_id;
        term["weight_rows"] = t.weight.rows;
        term["weight_cols"] = t.weight.cols;
        term["weight"] = t.weight.data;
        terms.push_back(std::move(term));
      }
      j["terms"] = std::move(terms);
      break;
    }
  }
  return j;
}

json class_json(const ClassAnalysis& ca, const InteractionSystem& system) {
  json j;
  j["class_id"] = ca.class_id;
  j["level"] = ca.level;
  j["members"] = system.decomposition.classes[ca.class_id].members;
  j["closed"] = ca.closed;
  j["stubborn"] = ca.stubborn_class;
  j["attitude"] = attitude_name(ca.attitude);
  j["all_rows_stochastic"] = ca.all_rows_stochastic;
  j["bipartite"] = ca.structure.is_bipartite;
  j["period"] = ca.structure.period;
  if (ca.structure.partition.has_value()) {
    j["partition_i"] = ca.structure.partition->first;
    j["partition_j"] = ca.structure.partition->second;
  }
  json drift;
  drift["diagonally_dominant"] = ca.drift.gershgorin.diagonally_dominant;
  drift["strict_rows"] = ca.drift.gershgorin.strict_rows;
  drift["stability_certificate"] = ca.drift.gershgorin.stability_certificate;
  drift["invertibility_certificate"] = ca.drift.gershgorin.invertibility_certificate;
  drift["invertible"] = ca.drift.invertible;
  drift["bipartite_singular"] = ca.drift.bipartite_singular;
  drift["plus_identity_variant_differs"] = ca.drift.plus_identity_variant_differs;
  j["drift"] = std::move(drift);
  j["prediction"] = prediction_json(ca.prediction);
  return j;
}

json limit_vector_json(const SystemAnalysis& analysis) {
  json agents = json::array();
  for (std::size_t i = 0; i < analysis.deterministic_limit.size(); ++i) {
    json a;
    a["agent"] = i;
    a["deterministic"] = static_cast<bool>(analysis.limit_deterministic[i]);
    if (analysis.limit_deterministic[i]) a["limit"] = analysis.deterministic_limit[i];
    agents.push_back(std::move(a));
  }
  return agents;
}

}  // namespace

std::string analysis_json(const InteractionSystem& system, const SystemAnalysis& analysis) {
  json j;
  j["n_agents"] = system.n();
  j["n_classes"] = system.decomposition.n_classes();
  j["n_levels"] = system.decomposition.n_levels();
  json classes = json::array();
  for (const auto& ca : analysis.classes) classes.push_back(class_json(ca, system));
  j["classes"] = std::move(classes);
  j["agents"] = limit_vector_json(analysis);
  return j.dump(2) + "\n";
}

std::string limits_json(const InteractionSystem& system, const SystemAnalysis& analysis) {
  json j;
  json classes = json::array();
  for (const auto& ca : analysis.classes) {
    json c;
    c["class_id"] = ca.class_id;
    c["level"] = ca.level;
    c["members"] = system.decomposition.classes[ca.class_id].members;
    c["prediction"] = prediction_json(ca.prediction);
    classes.push_back(std::move(c));
  }
  j["classes"] = std::move(classes);
  j["agents"] = limit_vector_json(analysis);
  return j.dump(2) + "\n";
}

std::string verification_json(const VerificationReport& report,
                              const HierarchyResiduals* residuals,
                              const std::vector<NondegeneracyEvidence>* evidence) {
  json j;
  j["all_pass"] = report.all_pass;
  j["n_runs"] = report.n_runs;
  j["n_steps"] = report.n_steps;
  j["seed"] = report.master_seed;
  json th;
  th["tol"] = report.thresholds.tol;
  th["var_min"] = report.thresholds.var_min;
  th["half_pass_fraction"] = report.thresholds.half_pass_fraction;
  j["thresholds"] = std::move(th);

  json verdicts = json::array();
  for (const auto& v : report.verdicts) {
    json c;
    c["class_id"] = v.class_id;
    c["kind"] = limit_kind_name(v.kind);
    c["pass"] = v.pass;
    c["statistic"] = v.statistic;
    c["threshold"] = v.threshold;
    c["detail"] = v.detail;
    if (v.variance_applicable) {
      c["cross_run_variance"] = v.cross_run_variance;
      c["nondegenerate"] = v.nondegenerate;
    }
    if (!v.checkpoint_medians.empty()) {
      c["checkpoint_medians"] = v.checkpoint_medians;
      c["medians_nonincreasing"] = v.medians_nonincreasing;
    }
    verdicts.push_back(std::move(c));
  }
  j["classes"] = std::move(verdicts);

  if (residuals != nullptr && !residuals->class_ids.empty()) {
    json r = json::array();
    for (std::size_t k = 0; k < residuals->class_ids.size(); ++k) {
      json e;
      e["class_id"] = residuals->class_ids[k];
      e["mean_residual"] = residuals->mean_residual[k];
      e["max_residual"] = residuals->max_residual[k];
      r.push_back(std::move(e));
    }
    j["hierarchy_residuals"] = std::move(r);
  }
  if (evidence != nullptr && !evidence->empty()) {
    json ev = json::array();
    for (const auto& e : *evidence) {
      json x;
      x["class_id"] = e.class_id;
      x["representative"] = e.representative;
      x["variance"] = e.variance;
      x["var_min"] = e.var_min;
      x["pass"] = e.pass;
      x["histogram"] = e.histogram;
      ev.push_back(std::move(x));
    }
    j["nondegeneracy"] = std::move(ev);
  }
  return j.dump(2) + "\n";
}

std::string manifest_json(const std::string& config_hash, std::uint64_t master_seed,
                          const std::vector<std::pair<std::size_t, std::uint64_t>>& run_seeds,
                          const std::vector<std::string>& files) {
  json j;
  j["config_hash"] = config_hash;
  j["master_seed"] = master_seed;
  json runs = json::array();
  for (const auto& [run, seed] : run_seeds) {
    json r;
    r["run"] = run;
    r["seed"] = seed;
    runs.push_back(std::move(r));
  }
  j["runs"] = std::move(runs);
  j["files"] = files;
  return j.dump(2) + "\n";
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

}  // namespace urnnet
