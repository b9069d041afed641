#include "seqfdr/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace seqfdr {

namespace pt = boost::property_tree;

OutputFormat parse_output_format(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  if (name == "text") return OutputFormat::text;
  throw ConfigError("output.format: expected csv, json or text, got '" + std::string(name) + "'");
}

std::string_view to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::text: return "text";
  }
  return "csv";
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const std::string t = trim(text);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty())
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  return value;
}

template <class Int>
Int to_integer(const std::string& key, const std::string& text) {
  Int value = 0;
  const std::string t = trim(text);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty())
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  return value;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

// Flattened view of the INI document with unknown-key checking.
class Document {
 public:
  explicit Document(const pt::ptree& tree) {
    static const std::map<std::string, std::set<std::string>> kSchema = {
        {"streams", {"family", "null", "alt", "J"}},
        {"truth", {"count", "indices"}},
        {"rule", {"type", "m", "c", "l", "u", "a", "b", "d", "n", "alpha", "bound_metric"}},
        {"budget", {"alpha", "beta"}},
        {"run", {"replications", "seed", "horizon", "metrics"}},
        {"output", {"format", "path"}},
        {"calibrate", {"grid_step", "c_cap", "n_cap", "full_scan", "target_fnr"}},
        {"sweep", {"budgets", "replications"}},
    };
    for (const auto& [section, body] : tree) {
      const auto schema = kSchema.find(section);
      if (schema == kSchema.end()) {
        if (body.empty()) throw ConfigError(section + ": keys must appear inside a [section]");
        throw ConfigError("unknown section [" + section + "]");
      }
      for (const auto& [key, value] : body) {
        if (!schema->second.contains(key)) throw ConfigError(section + "." + key + ": unknown key");
        values_[section + "." + key] = trim(value.data());
      }
    }
  }

  std::optional<std::string> get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string require(const std::string& key) const {
    if (auto v = get(key)) return *v;
    throw ConfigError(key + ": required key is missing");
  }

  double number(const std::string& key, double fallback) const {
    if (auto v = get(key)) return to_double(key, *v);
    return fallback;
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    if (auto v = get(key)) return to_integer<std::size_t>(key, *v);
    return fallback;
  }

  bool is_word(const std::string& key, std::string_view word) const {
    const auto v = get(key);
    return v && *v == word;
  }

 private:
  std::map<std::string, std::string> values_;
};

// Runs `f`, turning library validation failures into ConfigError prefixed by `key`.
template <class F>
auto checked(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

StreamProfile parse_streams(const Document& doc) {
  const std::string family_text = doc.get("streams.family").value_or("gaussian-mean");
  const Family family = checked("streams.family", [&] { return parse_family(family_text); });
  const auto null_values = split_list(doc.require("streams.null"));
  const auto alt_values = split_list(doc.require("streams.alt"));
  std::size_t streams = doc.count("streams.J", 0);
  if (streams == 0) streams = std::max(null_values.size(), alt_values.size());
  if (streams < 2) throw ConfigError("streams.J: at least two streams are required");

  auto expand = [&](const std::string& key, const std::vector<std::string>& items) {
    if (items.size() != 1 && items.size() != streams)
      throw ConfigError(key + ": expected one value or J = " + std::to_string(streams) + " values, got " +
                        std::to_string(items.size()));
    std::vector<double> out;
    for (std::size_t j = 0; j < streams; ++j) out.push_back(to_double(key, items[items.size() == 1 ? 0 : j]));
    return out;
  };
  const auto nulls = expand("streams.null", null_values);
  const auto alts = expand("streams.alt", alt_values);

  std::vector<StreamModel> models;
  for (std::size_t j = 0; j < streams; ++j)
    models.push_back(checked("streams", [&] { return StreamModel(family, nulls[j], alts[j]); }));
  return StreamProfile(std::move(models));
}

SignalSet parse_truth(const Document& doc, std::size_t streams) {
  const auto count = doc.get("truth.count");
  const auto indices = doc.get("truth.indices");
  if (count && indices) throw ConfigError("truth: give either count or indices, not both");
  if (count) {
    const auto k = to_integer<std::size_t>("truth.count", *count);
    if (k > streams) throw ConfigError("truth.count: exceeds J = " + std::to_string(streams));
    return SignalSet::first(k, streams);
  }
  if (indices) {
    std::vector<std::size_t> members;
    for (const std::string& item : split_list(*indices)) {
      const auto one_based = to_integer<std::size_t>("truth.indices", item);
      if (one_based < 1 || one_based > streams)
        throw ConfigError("truth.indices: stream " + item + " outside 1.." + std::to_string(streams));
      members.push_back(one_based - 1);
    }
    return checked("truth.indices", [&] { return SignalSet(std::move(members), streams); });
  }
  throw ConfigError("truth: one of count or indices is required");
}

ErrorBudget parse_budget(const Document& doc) {
  ErrorBudget budget{doc.number("budget.alpha", 0.05), doc.number("budget.beta", 0.05)};
  if (!(budget.alpha > 0.0 && budget.alpha < 1.0))
    throw ConfigError("budget.alpha: must lie in (0, 1), got " + format_double(budget.alpha));
  if (!(budget.beta > 0.0 && budget.beta < 1.0))
    throw ConfigError("budget.beta: must lie in (0, 1), got " + format_double(budget.beta));
  return budget;
}

double scaling_constant(const BoundConstants& k) { return std::max(k.c1_type1, k.c1_type2); }

}  // namespace

std::vector<ErrorBudget> parse_budget_list(const std::string& text) {
  std::vector<ErrorBudget> out;
  for (const std::string& item : split_list(text)) {
    const auto colon = item.find(':');
    ErrorBudget b;
    if (colon == std::string::npos) {
      b.alpha = b.beta = to_double("budgets", item);
    } else {
      b.alpha = to_double("budgets", item.substr(0, colon));
      b.beta = to_double("budgets", item.substr(colon + 1));
    }
    checked("budgets", [&] {
      b.validate();
      return 0;
    });
    out.push_back(b);
  }
  return out;
}

RunSettings parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }
  const Document doc(tree);

  StreamProfile profile = parse_streams(doc);
  const std::size_t streams = profile.size();
  SignalSet truth = parse_truth(doc, streams);
  const ErrorBudget budget = parse_budget(doc);

  RunSettings settings{.experiment = {std::move(profile), std::move(truth), IntersectionRule(1.0, 1.0)}};
  ExperimentConfig& cfg = settings.experiment;
  cfg.budget = budget;

  if (auto m = doc.get("rule.bound_metric"))
    settings.bound_metric = checked("rule.bound_metric", [&] { return parse_metric(*m); });

  const std::string type = doc.require("rule.type");
  const std::size_t default_m = cfg.truth.size();
  if (type == "gap") {
    const std::size_t m = doc.count("rule.m", default_m);
    if (m < 1 || m + 1 > streams) throw ConfigError("rule.m: must satisfy 1 <= m <= J-1, got " + std::to_string(m));
    double c = 1.0;
    if (doc.is_word("rule.c", "auto")) {
      settings.threshold_source = ThresholdSource::formula;
      const double c1 = checked("rule.bound_metric", [&] {
        return scaling_constant(bound_constants(settings.bound_metric, RuleClass::gap, streams, m, 0, 0));
      });
      c = gap_threshold(budget, m, streams, c1);
    } else if (doc.is_word("rule.c", "calibrate")) {
      settings.threshold_source = ThresholdSource::calibrate;
    } else {
      c = to_double("rule.c", doc.require("rule.c"));
    }
    cfg.rule = checked("rule.c", [&] { return GapRule(m, c); });
  } else if (type == "gap-intersection") {
    const std::size_t l = doc.count("rule.l", 0);
    const std::size_t u = doc.count("rule.u", streams);
    if (!(l < u && u <= streams))
      throw ConfigError("rule.l/rule.u: must satisfy 0 <= l < u <= J, got l = " + std::to_string(l) +
                        ", u = " + std::to_string(u));
    GiThresholds th;
    bool any_auto = false;
    for (const char* key : {"rule.a", "rule.b", "rule.c", "rule.d"}) any_auto |= doc.is_word(key, "auto");
    if (any_auto) {
      // pfdr/pfnr with l = 0 or u = J is rejected when the run starts, not here.
      const MetricKind scale_metric = is_conditional(settings.bound_metric) ? MetricKind::fdr : settings.bound_metric;
      const double c1 = scaling_constant(bound_constants(scale_metric, RuleClass::gap_intersection, streams, 0, l, u));
      th = gi_thresholds(budget, streams, l, u, c1);
      settings.threshold_source = ThresholdSource::formula;
    }
    auto pick = [&](const char* key, double formula_value) {
      if (doc.is_word(key, "auto")) return formula_value;
      return to_double(key, doc.require(key));
    };
    th = {pick("rule.a", th.a), pick("rule.b", th.b), pick("rule.c", th.c), pick("rule.d", th.d)};
    cfg.rule = checked("rule", [&] { return GapIntersectionRule(l, u, th); });
  } else if (type == "intersection") {
    const GiThresholds formula = gi_thresholds(budget, streams, 0, streams);
    auto pick = [&](const char* key, double formula_value) {
      if (doc.is_word(key, "auto")) {
        settings.threshold_source = ThresholdSource::formula;
        return formula_value;
      }
      return to_double(key, doc.require(key));
    };
    const double a = pick("rule.a", formula.a);
    const double b = pick("rule.b", formula.b);
    cfg.rule = checked("rule", [&] { return IntersectionRule(a, b); });
  } else if (type == "bh" || type == "top-m") {
    std::size_t n = 1;
    if (doc.is_word("rule.n", "calibrate"))
      settings.threshold_source = ThresholdSource::calibrate;
    else
      n = to_integer<std::size_t>("rule.n", doc.require("rule.n"));
    if (type == "bh") {
      const double level = doc.number("rule.alpha", budget.alpha);
      cfg.rule = checked("rule", [&] { return FixedSampleRule::bh(n, level); });
    } else {
      const std::size_t m = doc.count("rule.m", default_m);
      cfg.rule = checked("rule", [&] {
        FixedSampleRule r = FixedSampleRule::top_m(n, m);
        r.validate(streams);
        return r;
      });
    }
  } else {
    throw ConfigError("rule.type: expected gap, gap-intersection, intersection, bh or top-m, got '" + type + "'");
  }

  cfg.replications = doc.count("run.replications", cfg.replications);
  if (cfg.replications < 1) throw ConfigError("run.replications: must be >= 1");
  if (auto seed = doc.get("run.seed")) cfg.master_seed = to_integer<std::uint64_t>("run.seed", *seed);
  cfg.horizon = doc.count("run.horizon", cfg.horizon);
  if (cfg.horizon < 1) throw ConfigError("run.horizon: must be >= 1");
  if (auto metrics = doc.get("run.metrics")) {
    cfg.metrics.clear();
    for (const std::string& name : split_list(*metrics))
      cfg.metrics.push_back(checked("run.metrics", [&] { return parse_metric(name); }));
    if (cfg.metrics.empty()) throw ConfigError("run.metrics: at least one metric is required");
  }
  checked("config", [&] {
    cfg.validate();
    return 0;
  });

  if (auto f = doc.get("output.format")) settings.format = parse_output_format(*f);
  settings.output_path = doc.get("output.path").value_or("");

  CalibrationOptions& cal = settings.calibration;
  cal.replications = cfg.replications;
  cal.seed = cfg.master_seed;
  cal.horizon = cfg.horizon;
  cal.grid_step = doc.number("calibrate.grid_step", cal.grid_step);
  cal.c_cap = doc.number("calibrate.c_cap", cal.c_cap);
  cal.n_cap = doc.count("calibrate.n_cap", cal.n_cap);
  if (auto f = doc.get("calibrate.full_scan")) cal.full_scan = to_bool("calibrate.full_scan", *f);
  if (!(cal.grid_step > 0.0)) throw ConfigError("calibrate.grid_step: must be positive");
  if (!(cal.c_cap > 0.0)) throw ConfigError("calibrate.c_cap: must be positive");
  if (auto t = doc.get("calibrate.target_fnr")) {
    const double v = to_double("calibrate.target_fnr", *t);
    if (!(v > 0.0 && v < 1.0)) throw ConfigError("calibrate.target_fnr: must lie in (0, 1)");
    settings.target_fnr = v;
  }

  if (auto b = doc.get("sweep.budgets"))
    settings.sweep_budgets = checked("sweep.budgets", [&] { return parse_budget_list(*b); });
  settings.sweep_replications = doc.count("sweep.replications", settings.sweep_replications);
  return settings;
}

RunSettings load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  return parse_config(in);
}

std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  const StreamProfile& p = config.profile;
  out.emplace_back("streams.family", std::string(to_string(p[0].family())));
  auto list = [&](auto getter) {
    if (p.is_homogeneous()) return format_double(getter(p[0]));
    std::string s;
    for (std::size_t j = 0; j < p.size(); ++j) s += (j ? "," : "") + format_double(getter(p[j]));
    return s;
  };
  out.emplace_back("streams.null", list([](const StreamModel& m) { return m.null_param(); }));
  out.emplace_back("streams.alt", list([](const StreamModel& m) { return m.alt_param(); }));
  out.emplace_back("streams.J", std::to_string(p.size()));
  std::string indices;
  for (std::size_t j : config.truth.members()) indices += (indices.empty() ? "" : ",") + std::to_string(j + 1);
  out.emplace_back("truth.indices", indices);
  out.emplace_back("rule.type", rule_name(config.rule));
  std::visit(
      [&](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, GapRule>) {
          out.emplace_back("rule.m", std::to_string(r.signals()));
          out.emplace_back("rule.c", format_double(r.threshold()));
        } else if constexpr (std::is_same_v<R, GapIntersectionRule>) {
          out.emplace_back("rule.l", std::to_string(r.lower()));
          out.emplace_back("rule.u", std::to_string(r.upper()));
          out.emplace_back("rule.a", format_double(r.thresholds().a));
          out.emplace_back("rule.b", format_double(r.thresholds().b));
          out.emplace_back("rule.c", format_double(r.thresholds().c));
          out.emplace_back("rule.d", format_double(r.thresholds().d));
        } else if constexpr (std::is_same_v<R, IntersectionRule>) {
          out.emplace_back("rule.a", format_double(r.a()));
          out.emplace_back("rule.b", format_double(r.b()));
        } else {
          out.emplace_back("rule.n", std::to_string(r.n));
          if (r.kind == FixedSampleKind::bh)
            out.emplace_back("rule.alpha", format_double(r.alpha));
          else
            out.emplace_back("rule.m", std::to_string(r.m));
        }
      },
      config.rule);
  out.emplace_back("budget.alpha", format_double(config.budget.alpha));
  out.emplace_back("budget.beta", format_double(config.budget.beta));
  out.emplace_back("run.replications", std::to_string(config.replications));
  out.emplace_back("run.seed", std::to_string(config.master_seed));
  out.emplace_back("run.horizon", std::to_string(config.horizon));
  std::string metrics;
  for (MetricKind k : config.metrics) metrics += (metrics.empty() ? "" : ",") + std::string(to_string(k));
  out.emplace_back("run.metrics", metrics);
  return out;
}

}  // namespace seqfdr
