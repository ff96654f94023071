#include "fedx/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "fedx/errors.hpp"

namespace fedx {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key, "expected a real number, got '" + v + "'");
  }
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
  return out;
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  const long long n = parse_int(key, v);
  if (n < 0) throw ConfigError(key, "must be >= 0");
  return static_cast<std::size_t>(n);
}

int parse_small_int(const std::string& key, const std::string& v) {
  const long long n = parse_int(key, v);
  if (n < -2147483647LL || n > 2147483647LL) throw ConfigError(key, "out of range");
  return static_cast<int>(n);
}

std::uint64_t parse_seed(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected an unsigned 64-bit integer, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

template <typename E>
E parse_enum(const std::string& key, const std::string& v,
             std::initializer_list<std::pair<std::string_view, E>> options) {
  for (const auto& [name, value] : options) {
    if (v == name) return value;
  }
  std::string allowed;
  for (const auto& [name, value] : options) allowed += (allowed.empty() ? "" : "|") + std::string(name);
  throw ConfigError(key, "expected one of " + allowed + ", got '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key, "expected a comma-separated list");
  return out;
}

std::string_view history_name(HistorySamples h) {
  return h == HistorySamples::kReuse ? "reuse" : "independent";
}

std::string_view u_init_name(UInit u) { return u == UInit::kZero ? "zero" : "bootstrap"; }

struct Field {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    auto add = [&](std::string key, std::function<std::string(const RunConfig&)> get,
                   std::function<void(RunConfig&, const std::string&)> set) {
      f.push_back({std::move(key), std::move(get), std::move(set)});
    };
    auto dbl = [&](std::string key, auto member_ptr_get) {
      add(key, [=](const RunConfig& c) { return fmt_double(member_ptr_get(const_cast<RunConfig&>(c))); },
          [=](RunConfig& c, const std::string& v) { member_ptr_get(c) = parse_double(key, v); });
    };
    auto cnt = [&](std::string key, auto member_ptr_get) {
      add(key, [=](const RunConfig& c) { return std::to_string(member_ptr_get(const_cast<RunConfig&>(c))); },
          [=](RunConfig& c, const std::string& v) { member_ptr_get(c) = parse_count(key, v); });
    };
    auto num = [&](std::string key, auto member_ptr_get) {
      add(key, [=](const RunConfig& c) { return std::to_string(member_ptr_get(const_cast<RunConfig&>(c))); },
          [=](RunConfig& c, const std::string& v) { member_ptr_get(c) = parse_small_int(key, v); });
    };

    add("algorithm", [](const RunConfig& c) { return std::string(to_string(c.algorithm)); },
        [](RunConfig& c, const std::string& v) {
          c.algorithm = parse_enum<Algorithm>("algorithm", v,
                                              {{"fedx1", Algorithm::kFedX1},
                                               {"fedx2", Algorithm::kFedX2},
                                               {"local_sgd", Algorithm::kLocalSgd},
                                               {"local_pair", Algorithm::kLocalPair},
                                               {"centralized", Algorithm::kCentralized}});
        });
    add("seed", [](const RunConfig& c) { return std::to_string(c.hyper.seed); },
        [](RunConfig& c, const std::string& v) {
          c.hyper.seed = parse_seed("seed", v);
          c.data.seed = c.hyper.seed;
        });
    add("output_path", [](const RunConfig& c) { return c.output_path; },
        [](RunConfig& c, const std::string& v) {
          if (v.empty()) throw ConfigError("output_path", "must not be empty");
          c.output_path = v;
        });

    cnt("data.n_pos_per_client", [](RunConfig& c) -> auto& { return c.data.n_pos_per_client; });
    cnt("data.n_neg_per_client", [](RunConfig& c) -> auto& { return c.data.n_neg_per_client; });
    cnt("data.input_dim", [](RunConfig& c) -> auto& { return c.data.input_dim; });
    cnt("data.n_clients", [](RunConfig& c) -> auto& { return c.data.n_clients; });
    cnt("data.n_eval_pos", [](RunConfig& c) -> auto& { return c.data.n_eval_pos; });
    cnt("data.n_eval_neg", [](RunConfig& c) -> auto& { return c.data.n_eval_neg; });
    dbl("data.separation", [](RunConfig& c) -> auto& { return c.data.separation; });
    dbl("data.outlier_fraction", [](RunConfig& c) -> auto& { return c.data.outlier_fraction; });
    dbl("data.outlier_shift", [](RunConfig& c) -> auto& { return c.data.outlier_shift; });
    dbl("data.hetero_step", [](RunConfig& c) -> auto& { return c.data.hetero_step; });
    dbl("data.hetero_base", [](RunConfig& c) -> auto& { return c.data.hetero_base; });
    dbl("data.hetero_var", [](RunConfig& c) -> auto& { return c.data.hetero_var; });
    dbl("data.flip_fraction", [](RunConfig& c) -> auto& { return c.data.flip_fraction; });
    add("data.seed", [](const RunConfig& c) { return std::to_string(c.data.seed); },
        [](RunConfig& c, const std::string& v) { c.data.seed = parse_seed("data.seed", v); });

    add("scorer.kind", [](const RunConfig& c) { return std::string(to_string(c.scorer.kind)); },
        [](RunConfig& c, const std::string& v) {
          c.scorer.kind = parse_enum<ScorerKind>("scorer.kind", v,
                                                 {{"linear", ScorerKind::kLinear},
                                                  {"mlp1", ScorerKind::kMlp1}});
        });
    cnt("scorer.hidden_dim", [](RunConfig& c) -> auto& { return c.scorer.hidden_dim; });
    add("scorer.activation", [](const RunConfig&) { return std::string("tanh"); },
        [](RunConfig&, const std::string& v) {
          if (v != "tanh") throw ConfigError("scorer.activation", "only tanh is supported");
        });

    add("loss.kind", [](const RunConfig& c) { return std::string(to_string(c.loss.kind)); },
        [](RunConfig& c, const std::string& v) {
          c.loss.kind = parse_enum<PairwiseLossKind>("loss.kind", v,
                                                     {{"psm_sigmoid", PairwiseLossKind::kPsmSigmoid},
                                                      {"psm", PairwiseLossKind::kPsmSigmoid},
                                                      {"kl_opauc", PairwiseLossKind::kKlOpauc},
                                                      {"square", PairwiseLossKind::kSquare}});
        });
    dbl("loss.lambda", [](RunConfig& c) -> auto& { return c.loss.lambda; });

    add("outer.kind", [](const RunConfig& c) { return std::string(to_string(c.outer.kind)); },
        [](RunConfig& c, const std::string& v) {
          c.outer.kind = parse_enum<OuterKind>("outer.kind", v,
                                               {{"identity", OuterKind::kIdentity},
                                                {"kl_log", OuterKind::kKlLog}});
        });
    dbl("outer.lambda", [](RunConfig& c) -> auto& { return c.outer.lambda; });
    dbl("outer.u_floor", [](RunConfig& c) -> auto& { return c.outer.u_floor; });

    dbl("hyper.eta", [](RunConfig& c) -> auto& { return c.hyper.eta; });
    num("hyper.K", [](RunConfig& c) -> auto& { return c.hyper.K; });
    num("hyper.R", [](RunConfig& c) -> auto& { return c.hyper.R; });
    num("hyper.B1", [](RunConfig& c) -> auto& { return c.hyper.B1; });
    num("hyper.B2", [](RunConfig& c) -> auto& { return c.hyper.B2; });
    dbl("hyper.gamma", [](RunConfig& c) -> auto& { return c.hyper.gamma; });
    dbl("hyper.beta", [](RunConfig& c) -> auto& { return c.hyper.beta; });
    num("hyper.lr_decay_every", [](RunConfig& c) -> auto& { return c.hyper.lr_decay_every; });
    dbl("hyper.lr_decay_factor", [](RunConfig& c) -> auto& { return c.hyper.lr_decay_factor; });
    add("hyper.seed", [](const RunConfig& c) { return std::to_string(c.hyper.seed); },
        [](RunConfig& c, const std::string& v) { c.hyper.seed = parse_seed("hyper.seed", v); });
    add("hyper.history_samples",
        [](const RunConfig& c) { return std::string(history_name(c.hyper.history_samples)); },
        [](RunConfig& c, const std::string& v) {
          c.hyper.history_samples = parse_enum<HistorySamples>(
              "hyper.history_samples", v,
              {{"independent", HistorySamples::kIndependent}, {"reuse", HistorySamples::kReuse}});
        });
    add("hyper.u_init", [](const RunConfig& c) { return std::string(u_init_name(c.hyper.u_init)); },
        [](RunConfig& c, const std::string& v) {
          c.hyper.u_init = parse_enum<UInit>("hyper.u_init", v,
                                             {{"bootstrap", UInit::kBootstrap}, {"zero", UInit::kZero}});
        });

    add("theory.enabled", [](const RunConfig& c) { return std::string(c.theory.enabled ? "true" : "false"); },
        [](RunConfig& c, const std::string& v) { c.theory.enabled = parse_bool("theory.enabled", v); });
    dbl("theory.eps", [](RunConfig& c) -> auto& { return c.theory.eps; });
    dbl("theory.scale", [](RunConfig& c) -> auto& { return c.theory.scale; });

    num("eval.eval_every_rounds", [](RunConfig& c) -> auto& { return c.eval_every_rounds; });
    num("eval.oracle_every_rounds", [](RunConfig& c) -> auto& { return c.oracle_every_rounds; });
    add("eval.pauc_fprs",
        [](const RunConfig& c) {
          std::string s;
          for (double v : c.pauc_fprs) s += (s.empty() ? "" : ",") + fmt_double(v);
          return s;
        },
        [](RunConfig& c, const std::string& v) { c.pauc_fprs = parse_list("eval.pauc_fprs", v); });
    add("eval.verbose", [](const RunConfig& c) { return std::string(c.verbose ? "true" : "false"); },
        [](RunConfig& c, const std::string& v) { c.verbose = parse_bool("eval.verbose", v); });
    return f;
  }();
  return table;
}

// `seed` is an alias written through data.seed and hyper.seed.
bool is_alias(const std::string& key) { return key == "seed"; }

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kFedX1: return "fedx1";
    case Algorithm::kFedX2: return "fedx2";
    case Algorithm::kLocalSgd: return "local_sgd";
    case Algorithm::kLocalPair: return "local_pair";
    case Algorithm::kCentralized: return "centralized";
  }
  return "?";
}

std::string_view to_string(PairwiseLossKind k) {
  switch (k) {
    case PairwiseLossKind::kPsmSigmoid: return "psm_sigmoid";
    case PairwiseLossKind::kKlOpauc: return "kl_opauc";
    case PairwiseLossKind::kSquare: return "square";
  }
  return "?";
}

std::string_view to_string(OuterKind k) {
  return k == OuterKind::kKlLog ? "kl_log" : "identity";
}

std::string_view to_string(ScorerKind k) { return k == ScorerKind::kMlp1 ? "mlp1" : "linear"; }

void validate(const RunConfig& c) {
  validate(c.data);
  if (c.scorer.kind == ScorerKind::kMlp1 && c.scorer.hidden_dim == 0) {
    throw ConfigError("scorer.hidden_dim", "must be >= 1");
  }
  validate(c.loss);
  validate(c.outer);
  validate(c.hyper);
  check_compatibility(c.algorithm, c.outer);
  if (c.eval_every_rounds < 1) throw ConfigError("eval.eval_every_rounds", "must be >= 1");
  if (c.oracle_every_rounds < 1) throw ConfigError("eval.oracle_every_rounds", "must be >= 1");
  for (double q : c.pauc_fprs) {
    if (!(q > 0.0 && q <= 1.0)) throw ConfigError("eval.pauc_fprs", "entries must lie in (0, 1]");
    if (std::floor(q * static_cast<double>(c.data.n_eval_neg)) < 1.0) {
      throw ConfigError("eval.pauc_fprs", "selects no evaluation negatives");
    }
  }
  if (c.theory.enabled) {
    if (!(c.theory.eps > 0.0 && c.theory.eps < 1.0)) throw ConfigError("theory.eps", "must lie in (0, 1)");
    if (!(c.theory.scale > 0.0)) throw ConfigError("theory.scale", "must be > 0");
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected `key = value`");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto& table = fields();
    auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
    if (it == table.end()) throw ConfigError(key, "unknown key");
    it->set(c, value);
    c.explicit_keys.insert(key);
    if (is_alias(key)) {
      c.explicit_keys.insert("data.seed");
      c.explicit_keys.insert("hyper.seed");
    }
  }
  c.scorer.input_dim = c.data.input_dim;
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const RunConfig& c) {
  std::string out;
  for (const auto& f : fields()) {
    if (is_alias(f.key)) continue;
    out += f.key + " = " + f.get(c) + "\n";
  }
  return out;
}

std::string to_one_line(const RunConfig& c) {
  std::string out;
  for (const auto& f : fields()) {
    if (is_alias(f.key)) continue;
    out += (out.empty() ? "" : " ") + f.key + "=" + f.get(c);
  }
  return out;
}

RunConfig resolve_schedule(RunConfig c, const FederatedDataset& data) {
  if (!c.theory.enabled) return c;
  std::size_t m = 0;
  for (const auto& shard : data.clients) m = std::max(m, shard.pos.size());
  const bool fedx1_kind =
      c.algorithm == Algorithm::kFedX1 || c.outer.kind == OuterKind::kIdentity;
  const HyperParams scheduled =
      theory_schedule(fedx1_kind ? ScheduleKind::kFedX1 : ScheduleKind::kFedX2, c.theory.eps,
                      data.clients.size(), m, c.theory.scale, c.hyper);
  auto keep = [&](const char* key) { return c.explicit_keys.count(key) != 0; };
  if (!keep("hyper.eta")) c.hyper.eta = scheduled.eta;
  if (!keep("hyper.K")) c.hyper.K = scheduled.K;
  if (!keep("hyper.R")) c.hyper.R = scheduled.R;
  if (!keep("hyper.gamma")) c.hyper.gamma = scheduled.gamma;
  if (!keep("hyper.beta")) c.hyper.beta = scheduled.beta;
  validate(c.hyper);
  return c;
}

}  // namespace fedx
