#include "urnnet/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <locale>
#include <set>
#include <sstream>

#include "urnnet/error.hpp"
#include "urnnet/io.hpp"

namespace urnnet {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc{} && p == e;
}

bool parse_size(const std::string& s, std::size_t& out) {
  std::uint64_t v;
  if (!parse_u64(s, v)) return false;
  out = static_cast<std::size_t>(v);
  return true;
}

bool parse_real(const std::string& s, double& out) {
  // strtod via istringstream keeps this free of locale surprises at the
  // cost of rejecting hex floats, which the format does not use anyway
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  if (!(in >> out)) return false;
  char c;
  return !(in >> c);
}

struct RawForcing {
  std::size_t line;
  std::size_t agent;
  std::vector<std::string> tokens;
};

}  // namespace

std::string ConfigIssue::render() const {
  std::string out;
  if (line > 0) out += "line " + std::to_string(line) + ": ";
  if (!field.empty()) out += field + ": ";
  out += reason;
  return out;
}

const char* parse_attitude(const std::string& word, Attitude& out) {
  if (word == "competitive") {
    out = Attitude::Competitive;
    return nullptr;
  }
  if (word == "cooperative") {
    out = Attitude::Cooperative;
    return nullptr;
  }
  return "expected 'competitive' or 'cooperative'";
}

std::vector<std::optional<Attitude>> attitude_tags(const ExperimentConfig& cfg) {
  std::vector<std::optional<Attitude>> tags(cfg.matrix.rows);
  if (cfg.global_attitude.has_value()) {
    for (auto& t : tags) t = *cfg.global_attitude;
    return tags;
  }
  for (std::size_t i : cfg.competitive_agents)
    if (i < tags.size()) tags[i] = Attitude::Competitive;
  for (std::size_t i : cfg.cooperative_agents)
    if (i < tags.size()) tags[i] = Attitude::Cooperative;
  return tags;
}

InteractionSystem system_from_config(const ExperimentConfig& cfg) {
  return make_system(cfg.matrix, attitude_tags(cfg), cfg.forcing, cfg.stubborn);
}

ParseResult parse_config(const std::string& text, const std::string& base_dir) {
  ParseResult result;
  auto issue = [&](std::size_t line, const std::string& field, const std::string& reason) {
    result.issues.push_back({line, field, reason});
  };

  ExperimentConfig cfg;
  std::vector<Vec> rows;
  std::vector<RawForcing> raw_forcing;
  bool schedule_seen_gamma = false, schedule_seen_scale = false, schedule_seen_m = false;
  std::string section;

  std::istringstream in(text);
  std::string raw_line;
  std::size_t line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    std::string line = raw_line;
    std::size_t cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.resize(cut);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        issue(line_no, "", "unterminated section header");
        continue;
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      static const std::set<std::string> known{"matrix", "attitudes", "forcing",
                                              "stubborn", "schedule", "run",
                                              "output", "verify"};
      if (known.count(section) == 0) {
        issue(line_no, section, "unknown section");
        section.clear();
      }
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      issue(line_no, "", "expected key = value");
      continue;
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (section.empty()) {
      issue(line_no, key, "key outside any section");
      continue;
    }
    if (key.empty()) {
      issue(line_no, "", "empty key");
      continue;
    }

    if (section == "matrix") {
      if (key == "row") {
        Vec row;
        for (const std::string& tok : split_ws(value)) {
          double v;
          if (!parse_real(tok, v)) {
            issue(line_no, "matrix", "bad number '" + tok + "'");
            v = 0.0;
          }
          row.push_back(v);
        }
        if (row.empty()) issue(line_no, "matrix", "empty row");
        rows.push_back(std::move(row));
      } else if (key == "file") {
        cfg.matrix_file = value;
      } else {
        issue(line_no, key, "unknown key in [matrix]");
      }
    } else if (section == "attitudes") {
      if (key == "global") {
        Attitude a;
        if (const char* err = parse_attitude(value, a))
          issue(line_no, "attitudes", err);
        else
          cfg.global_attitude = a;
      } else if (key == "competitive" || key == "cooperative") {
        auto& list = (key == "competitive") ? cfg.competitive_agents : cfg.cooperative_agents;
        for (const std::string& tok : split_ws(value)) {
          std::size_t i;
          if (!parse_size(tok, i))
            issue(line_no, "attitudes", "bad agent index '" + tok + "'");
          else
            list.push_back(i);
        }
      } else {
        issue(line_no, key, "unknown key in [attitudes]");
      }
    } else if (section == "forcing") {
      std::size_t agent;
      if (!parse_size(key, agent)) {
        issue(line_no, "forcing", "key must be an agent index");
        continue;
      }
      raw_forcing.push_back({line_no, agent, split_ws(value)});
    } else if (section == "stubborn") {
      std::size_t agent;
      double v;
      if (!parse_size(key, agent))
        issue(line_no, "stubborn", "key must be an agent index");
      else if (!parse_real(value, v))
        issue(line_no, "stubborn", "bad value '" + value + "'");
      else
        cfg.stubborn.emplace_back(agent, v);
    } else if (section == "schedule") {
      if (key == "kind") {
        if (value == "urn") {
          cfg.schedule.kind = StepSchedule::Kind::UrnDefault;
        } else if (value == "power") {
          cfg.schedule.kind = StepSchedule::Kind::PowerLaw;
        } else {
          issue(line_no, "schedule", "kind must be 'urn' or 'power'");
        }
      } else if (key == "m") {
        if (!parse_size(value, cfg.schedule.m))
          issue(line_no, "schedule", "bad m '" + value + "'");
        schedule_seen_m = true;
      } else if (key == "gamma") {
        if (!parse_real(value, cfg.schedule.gamma))
          issue(line_no, "schedule", "bad gamma '" + value + "'");
        schedule_seen_gamma = true;
      } else if (key == "scale") {
        if (!parse_real(value, cfg.schedule.scale))
          issue(line_no, "schedule", "bad scale '" + value + "'");
        schedule_seen_scale = true;
      } else {
        issue(line_no, key, "unknown key in [schedule]");
      }
    } else if (section == "run") {
      if (key == "steps") {
        if (!parse_size(value, cfg.n_steps)) issue(line_no, "run", "bad steps '" + value + "'");
      } else if (key == "runs") {
        if (!parse_size(value, cfg.n_runs)) issue(line_no, "run", "bad runs '" + value + "'");
      } else if (key == "seed") {
        if (!parse_u64(value, cfg.master_seed)) issue(line_no, "run", "bad seed '" + value + "'");
      } else if (key == "initial") {
        cfg.initial.clear();
        for (const std::string& tok : split_ws(value)) {
          double v;
          if (!parse_real(tok, v)) {
            issue(line_no, "run", "bad initial value '" + tok + "'");
            v = 0.5;
          }
          cfg.initial.push_back(v);
        }
      } else {
        issue(line_no, key, "unknown key in [run]");
      }
    } else if (section == "output") {
      if (key == "dir") {
        cfg.out_dir = value;
      } else if (key == "format") {
        if (value != "csv" && value != "json")
          issue(line_no, "output", "format must be 'csv' or 'json'");
        else
          cfg.format = value;
      } else {
        issue(line_no, key, "unknown key in [output]");
      }
    } else if (section == "verify") {
      if (key == "tol") {
        if (!parse_real(value, cfg.thresholds.tol)) issue(line_no, "verify", "bad tol");
      } else if (key == "var_min") {
        if (!parse_real(value, cfg.thresholds.var_min)) issue(line_no, "verify", "bad var_min");
      } else if (key == "half_pass_fraction") {
        if (!parse_real(value, cfg.thresholds.half_pass_fraction))
          issue(line_no, "verify", "bad half_pass_fraction");
      } else if (key == "checkpoints") {
        cfg.checkpoints.clear();
        for (const std::string& tok : split_ws(value)) {
          std::size_t c;
          if (!parse_size(tok, c))
            issue(line_no, "verify", "bad checkpoint '" + tok + "'");
          else
            cfg.checkpoints.push_back(c);
        }
      } else {
        issue(line_no, key, "unknown key in [verify]");
      }
    }
  }

  // ---- semantic validation (line 0 issues) ----

  if (!rows.empty() && !cfg.matrix_file.empty())
    issue(0, "matrix", "give inline rows or a file, not both");
  if (rows.empty() && cfg.matrix_file.empty()) issue(0, "matrix", "no matrix given");

  if (!rows.empty()) {
    std::size_t n = rows.size();
    bool square = true;
    for (const auto& r : rows) square = square && r.size() == n;
    if (!square) {
      issue(0, "matrix", "need N rows of N entries");
    } else {
      cfg.matrix = Mat(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cfg.matrix(i, j) = rows[i][j];
    }
  } else if (!cfg.matrix_file.empty()) {
    std::string path = cfg.matrix_file;
    if (!base_dir.empty() && !path.empty() && path.front() != '/')
      path = base_dir + "/" + path;
    try {
      cfg.matrix = load_matrix_file(path);
    } catch (const Error& e) {
      issue(0, "matrix", e.what());
    }
  }
  if (cfg.matrix.empty()) {
    issue(0, "matrix", "cannot validate further without a matrix");
    return result;
  }
  const std::size_t n = cfg.matrix.rows;

  Vec row_sums(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (cfg.matrix(i, j) < 0.0)
        issue(0, "matrix",
              "negative entry at " + std::to_string(i) + "," + std::to_string(j));
      row_sums[i] += cfg.matrix(i, j);
    }
    if (row_sums[i] > 1.0 + InteractionMatrix::kRowSumTol)
      issue(0, "matrix", "row " + std::to_string(i) + " sums above 1");
  }

  std::vector<bool> stubborn_flag(n, false);
  std::sort(cfg.stubborn.begin(), cfg.stubborn.end());
  for (const auto& [agent, v] : cfg.stubborn) {
    if (agent >= n) {
      issue(0, "stubborn", "agent " + std::to_string(agent) + " out of range");
      continue;
    }
    if (stubborn_flag[agent])
      issue(0, "stubborn", "agent " + std::to_string(agent) + " pinned twice");
    stubborn_flag[agent] = true;
    if (!(v >= 0.0 && v <= 1.0))
      issue(0, "stubborn", "agent " + std::to_string(agent) + " value outside [0,1]");
  }

  bool has_lists = !cfg.competitive_agents.empty() || !cfg.cooperative_agents.empty();
  if (cfg.global_attitude.has_value() && has_lists)
    issue(0, "attitudes", "give global or agent lists, not both");
  if (!cfg.global_attitude.has_value() && !has_lists)
    issue(0, "attitudes", "no attitude assignment");
  if (has_lists) {
    std::vector<int> seen(n, 0);
    for (std::size_t i : cfg.competitive_agents) {
      if (i >= n)
        issue(0, "attitudes", "agent " + std::to_string(i) + " out of range");
      else
        ++seen[i];
    }
    for (std::size_t i : cfg.cooperative_agents) {
      if (i >= n)
        issue(0, "attitudes", "agent " + std::to_string(i) + " out of range");
      else
        ++seen[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (seen[i] > 1)
        issue(0, "attitudes", "agent " + std::to_string(i) + " assigned twice");
      if (seen[i] == 0 && !stubborn_flag[i])
        issue(0, "attitudes", "agent " + std::to_string(i) + " unassigned");
    }
  }

  cfg.forcing.agents.assign(raw_forcing.empty() ? 0 : n, ForcingSpec::PerAgent{});
  for (const auto& rf : raw_forcing) {
    if (rf.agent >= n) {
      issue(rf.line, "forcing", "agent " + std::to_string(rf.agent) + " out of range");
      continue;
    }
    ForcingSpec::PerAgent& fa = cfg.forcing.agents[rf.agent];
    if (fa.kind != ForcingSpec::Kind::None) {
      issue(rf.line, "forcing", "agent " + std::to_string(rf.agent) + " given twice");
      continue;
    }
    if (rf.tokens.empty()) {
      issue(rf.line, "forcing", "empty forcing spec");
      continue;
    }
    if (rf.tokens[0] == "constant") {
      double v;
      if (rf.tokens.size() != 2 || !parse_real(rf.tokens[1], v)) {
        issue(rf.line, "forcing", "constant needs one value");
        continue;
      }
      fa.kind = ForcingSpec::Kind::Constant;
      fa.limit = v;
    } else if (rf.tokens[0] == "piecewise") {
      if (rf.tokens.size() < 2) {
        issue(rf.line, "forcing", "piecewise needs step:value pairs");
        continue;
      }
      bool bad = false;
      for (std::size_t k = 1; k < rf.tokens.size() && !bad; ++k) {
        std::size_t colon = rf.tokens[k].find(':');
        std::size_t from;
        double v;
        if (colon == std::string::npos ||
            !parse_size(rf.tokens[k].substr(0, colon), from) ||
            !parse_real(rf.tokens[k].substr(colon + 1), v)) {
          issue(rf.line, "forcing", "bad piece '" + rf.tokens[k] + "'");
          bad = true;
          break;
        }
        if (!fa.pieces.empty() && from <= fa.pieces.back().first) {
          issue(rf.line, "forcing", "piece steps must ascend");
          bad = true;
          break;
        }
        fa.pieces.emplace_back(from, v);
      }
      if (bad) {
        fa = {};
        continue;
      }
      fa.kind = ForcingSpec::Kind::PiecewiseConstant;
      fa.limit = fa.pieces.back().second;
    } else {
      issue(rf.line, "forcing", "unknown forcing kind '" + rf.tokens[0] + "'");
      continue;
    }
    if (stubborn_flag[rf.agent])
      issue(0, "forcing", "agent " + std::to_string(rf.agent) + " is stubborn");
    else if (row_sums[rf.agent] >= 1.0 - InteractionMatrix::kRowSumTol)
      issue(0, "forcing", "row " + std::to_string(rf.agent) + " has alpha_i = 1");
    if (!(fa.limit >= 0.0 && fa.limit <= 1.0))
      issue(0, "forcing", "agent " + std::to_string(rf.agent) + " limit outside [0,1]");
    for (const auto& [from, v] : fa.pieces)
      if (!(v >= 0.0 && v <= 1.0))
        issue(0, "forcing", "agent " + std::to_string(rf.agent) + " value outside [0,1]");
  }

  if (cfg.schedule.kind == StepSchedule::Kind::UrnDefault) {
    if (schedule_seen_gamma || schedule_seen_scale)
      issue(0, "schedule", "gamma/scale apply to the power kind only");
    if (cfg.schedule.m < 1) issue(0, "schedule", "m must be >= 1");
  } else {
    if (schedule_seen_m) issue(0, "schedule", "m applies to the urn kind only");
    if (!(cfg.schedule.gamma > 0.5 && cfg.schedule.gamma <= 1.0))
      issue(0, "schedule", "gamma must be in (0.5, 1]");
    if (!(cfg.schedule.scale > 0.0 && cfg.schedule.scale < 1.0))
      issue(0, "schedule", "scale must be in (0, 1)");
  }

  if (cfg.n_runs < 1) issue(0, "run", "runs must be >= 1");
  if (cfg.initial.size() == 1) cfg.initial.assign(n, cfg.initial.front());
  if (!cfg.initial.empty() && cfg.initial.size() != n)
    issue(0, "run", "initial needs one value or one per agent");
  for (double v : cfg.initial)
    if (!(v >= 0.0 && v <= 1.0)) {
      issue(0, "run", "initial values must be in [0,1]");
      break;
    }

  if (!(cfg.thresholds.tol > 0.0)) issue(0, "verify", "tol must be positive");
  if (!(cfg.thresholds.var_min >= 0.0)) issue(0, "verify", "var_min must be nonnegative");
  if (!(cfg.thresholds.half_pass_fraction > 0.0 && cfg.thresholds.half_pass_fraction <= 1.0))
    issue(0, "verify", "half_pass_fraction must be in (0, 1]");
  for (std::size_t k = 0; k < cfg.checkpoints.size(); ++k)
    if (cfg.checkpoints[k] == 0 || (k > 0 && cfg.checkpoints[k] <= cfg.checkpoints[k - 1])) {
      issue(0, "verify", "checkpoints must be strictly increasing and positive");
      break;
    }

  if (result.issues.empty()) {
    try {
      system_from_config(cfg);  // final gate: class-level constraints
    } catch (const Error& e) {
      issue(0, "system", e.what());
    }
  }
  if (result.issues.empty()) result.config = std::move(cfg);
  return result;
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::string out;
  out += "[matrix]\n";
  for (std::size_t i = 0; i < cfg.matrix.rows; ++i) {
    out += "row =";
    for (std::size_t j = 0; j < cfg.matrix.cols; ++j) {
      out.push_back(' ');
      out += format_double(cfg.matrix(i, j));
    }
    out.push_back('\n');
  }

  out += "[attitudes]\n";
  if (cfg.global_attitude.has_value()) {
    out += "global = ";
    out += attitude_name(*cfg.global_attitude);
    out.push_back('\n');
  } else {
    auto emit_list = [&](const char* name, std::vector<std::size_t> list) {
      if (list.empty()) return;
      std::sort(list.begin(), list.end());
      out += name;
      out += " =";
      for (std::size_t i : list) out += " " + std::to_string(i);
      out.push_back('\n');
    };
    emit_list("competitive", cfg.competitive_agents);
    emit_list("cooperative", cfg.cooperative_agents);
  }

  bool any_forcing = cfg.forcing.any();
  if (any_forcing) {
    out += "[forcing]\n";
    for (std::size_t i = 0; i < cfg.forcing.agents.size(); ++i) {
      const auto& fa = cfg.forcing.agents[i];
      if (fa.kind == ForcingSpec::Kind::None) continue;
      if (fa.kind == ForcingSpec::Kind::Callback)
        throw Error(ErrorCode::InvalidArgument,
                    "callback forcing has no text form", i);
      out += std::to_string(i) + " = ";
      if (fa.kind == ForcingSpec::Kind::Constant) {
        out += "constant " + format_double(fa.limit);
      } else {
        out += "piecewise";
        for (const auto& [from, v] : fa.pieces)
          out += " " + std::to_string(from) + ":" + format_double(v);
      }
      out.push_back('\n');
    }
  }

  if (!cfg.stubborn.empty()) {
    out += "[stubborn]\n";
    auto sorted = cfg.stubborn;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [agent, v] : sorted)
      out += std::to_string(agent) + " = " + format_double(v) + "\n";
  }

  out += "[schedule]\n";
  if (cfg.schedule.kind == StepSchedule::Kind::UrnDefault) {
    out += "kind = urn\n";
    out += "m = " + std::to_string(cfg.schedule.m) + "\n";
  } else {
    out += "kind = power\n";
    out += "gamma = " + format_double(cfg.schedule.gamma) + "\n";
    out += "scale = " + format_double(cfg.schedule.scale) + "\n";
  }

  out += "[run]\n";
  out += "steps = " + std::to_string(cfg.n_steps) + "\n";
  out += "runs = " + std::to_string(cfg.n_runs) + "\n";
  out += "seed = " + std::to_string(cfg.master_seed) + "\n";
  if (!cfg.initial.empty()) {
    out += "initial =";
    for (double v : cfg.initial) out += " " + format_double(v);
    out.push_back('\n');
  }

  out += "[output]\n";
  if (!cfg.out_dir.empty()) out += "dir = " + cfg.out_dir + "\n";
  out += "format = " + cfg.format + "\n";

  out += "[verify]\n";
  out += "tol = " + format_double(cfg.thresholds.tol) + "\n";
  out += "var_min = " + format_double(cfg.thresholds.var_min) + "\n";
  out += "half_pass_fraction = " + format_double(cfg.thresholds.half_pass_fraction) + "\n";
  if (!cfg.checkpoints.empty()) {
    out += "checkpoints =";
    for (std::size_t c : cfg.checkpoints) out += " " + std::to_string(c);
    out.push_back('\n');
  }
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  return hex64(fnv1a64(canonical_config(cfg)));
}

}  // namespace urnnet
