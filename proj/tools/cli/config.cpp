#include "cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

namespace mseol::cli {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

template <typename T>
T parse_num(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("'" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) out.push_back(parse_num<T>(key, item));
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
std::string fmt_list(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += fmt(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

struct Field {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  using S = const std::string&;
  static const std::vector<Field> table = {
      {"classes", [](C& c, S v) { c.classes = parse_num<int>("classes", v); },
       [](const C& c) { return std::to_string(c.classes); }},
      {"dim", [](C& c, S v) { c.dim = parse_num<std::size_t>("dim", v); },
       [](const C& c) { return std::to_string(c.dim); }},
      {"means",
       [](C& c, S v) {
         c.means.clear();
         if (trim(v) == "circle" || trim(v).empty()) return;
         for (const auto& vec : split(v, ';')) c.means.push_back(parse_list<double>("means", vec));
       },
       [](const C& c) {
         if (c.means.empty()) return std::string("circle");
         std::string out;
         for (std::size_t i = 0; i < c.means.size(); ++i) {
           if (i > 0) out += ';';
           out += fmt_list(c.means[i]);
         }
         return out;
       }},
      {"mean_radius", [](C& c, S v) { c.mean_radius = parse_num<double>("mean_radius", v); },
       [](const C& c) { return fmt(c.mean_radius); }},
      {"stddev", [](C& c, S v) { c.stddev = parse_num<double>("stddev", v); },
       [](const C& c) { return fmt(c.stddev); }},
      {"data_seed",
       [](C& c, S v) { c.data_seed = parse_num<std::uint64_t>("data_seed", v); },
       [](const C& c) { return std::to_string(c.effective_data_seed()); }},
      {"imbalance",
       [](C& c, S v) {
         const auto t = trim(v);
         if (t == "long-tailed") {
           c.imbalance = ImbalanceKind::LongTailed;
         } else if (t == "step") {
           c.imbalance = ImbalanceKind::Step;
         } else {
           throw ConfigError("'imbalance' must be long-tailed or step, got '" + t + "'");
         }
       },
       [](const C& c) {
         return std::string(c.imbalance == ImbalanceKind::LongTailed ? "long-tailed" : "step");
       }},
      {"ratio", [](C& c, S v) { c.ratio = parse_num<double>("ratio", v); },
       [](const C& c) { return fmt(c.ratio); }},
      {"n_max", [](C& c, S v) { c.n_max = parse_num<std::size_t>("n_max", v); },
       [](const C& c) { return std::to_string(c.n_max); }},
      {"train_counts",
       [](C& c, S v) { c.train_counts = parse_list<std::size_t>("train_counts", v); },
       [](const C& c) { return fmt_list(c.train_counts); }},
      {"val_per_class",
       [](C& c, S v) { c.val_per_class = parse_num<std::size_t>("val_per_class", v); },
       [](const C& c) { return std::to_string(c.val_per_class); }},
      {"test_per_class",
       [](C& c, S v) { c.test_per_class = parse_num<std::size_t>("test_per_class", v); },
       [](const C& c) { return std::to_string(c.test_per_class); }},
      {"loss",
       [](C& c, S v) {
         const auto kind = parse_loss_kind(trim(v));
         if (!kind) throw ConfigError("'loss' must be one of ce, wce, focal, mse, mse-ol");
         c.loss = *kind;
       },
       [](const C& c) { return std::string(to_string(c.loss)); }},
      {"alpha",
       [](C& c, S v) {
         if (trim(v).empty()) {
           c.alpha.reset();
         } else {
           c.alpha = parse_num<double>("alpha", v);
         }
       },
       [](const C& c) { return c.alpha ? fmt(*c.alpha) : std::string(); }},
      {"focal_gamma", [](C& c, S v) { c.focal_gamma = parse_num<double>("focal_gamma", v); },
       [](const C& c) { return fmt(c.focal_gamma); }},
      {"lr_base", [](C& c, S v) { c.lr_base = parse_num<double>("lr_base", v); },
       [](const C& c) { return fmt(c.lr_base); }},
      {"epochs", [](C& c, S v) { c.epochs = parse_num<int>("epochs", v); },
       [](const C& c) { return std::to_string(c.epochs); }},
      {"batch_size", [](C& c, S v) { c.batch_size = parse_num<std::size_t>("batch_size", v); },
       [](const C& c) { return std::to_string(c.batch_size); }},
      {"momentum", [](C& c, S v) { c.momentum = parse_num<double>("momentum", v); },
       [](const C& c) { return fmt(c.momentum); }},
      {"weight_decay", [](C& c, S v) { c.weight_decay = parse_num<double>("weight_decay", v); },
       [](const C& c) { return fmt(c.weight_decay); }},
      {"schedule",
       [](C& c, S v) {
         const auto kind = parse_schedule_kind(trim(v));
         if (!kind) throw ConfigError("'schedule' must be poly or constant");
         c.schedule = *kind;
       },
       [](const C& c) { return std::string(to_string(c.schedule)); }},
      {"hidden", [](C& c, S v) { c.hidden = parse_list<std::size_t>("hidden", v); },
       [](const C& c) { return fmt_list(c.hidden); }},
      {"seed", [](C& c, S v) { c.seed = parse_num<std::uint64_t>("seed", v); },
       [](const C& c) { return std::to_string(c.seed); }},
      {"seeds", [](C& c, S v) { c.seeds = parse_list<std::uint64_t>("seeds", v); },
       [](const C& c) { return fmt_list(c.effective_seeds()); }},
      {"alpha_candidates",
       [](C& c, S v) { c.alpha_candidates = parse_list<double>("alpha_candidates", v); },
       [](const C& c) { return fmt_list(c.alpha_candidates); }},
      {"select_metric",
       [](C& c, S v) {
         const auto t = trim(v);
         if (t == "macro-f") {
           c.select_metric = SelectionMetric::MacroF;
         } else if (t == "miou") {
           c.select_metric = SelectionMetric::MeanIoU;
         } else {
           throw ConfigError("'select_metric' must be macro-f or miou");
         }
       },
       [](const C& c) {
         return std::string(c.select_metric == SelectionMetric::MacroF ? "macro-f" : "miou");
       }},
      {"threads", [](C& c, S v) { c.threads = parse_num<unsigned>("threads", v); },
       [](const C& c) { return std::to_string(c.threads); }},
      {"out", [](C& c, S v) { c.out = trim(v); }, [](const C& c) { return c.out.string(); }},
      {"data_dir", [](C& c, S v) { c.data_dir = trim(v); },
       [](const C& c) { return c.effective_data_dir().string(); }},
      {"checkpoint", [](C& c, S v) { c.checkpoint = trim(v); },
       [](const C& c) { return c.effective_checkpoint().string(); }},
      {"split", [](C& c, S v) { c.split = trim(v); }, [](const C& c) { return c.split; }},
  };
  return table;
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(*this, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

std::vector<std::size_t> ExperimentConfig::planned_train_counts() const {
  if (!train_counts.empty()) return train_counts;
  return imbalanced_counts(classes, {imbalance, ratio, n_max});
}

GaussianMixtureSpec ExperimentConfig::mixture(std::uint64_t stream_seed) const {
  GaussianMixtureSpec spec;
  spec.num_classes = classes;
  spec.dim = dim;
  spec.means = means.empty() ? circle_means(classes, dim, mean_radius) : means;
  spec.stddev = stddev;
  spec.seed = stream_seed;
  return spec;
}

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig t;
  t.loss = loss;
  t.alpha = alpha.value_or(1.0);
  t.focal_gamma = focal_gamma;
  t.lr_base = lr_base;
  t.epoch_max = epochs;
  t.batch_size = batch_size;
  t.momentum = momentum;
  t.weight_decay = weight_decay;
  t.seed = seed;
  t.schedule = schedule;
  t.hidden = hidden;
  return t;
}

void ExperimentConfig::validate(Command command) const {
  const bool generating = command == Command::Generate;
  const bool training = command == Command::Train || command == Command::SweepAlpha;

  if (classes < 2) throw ConfigError("'classes' must be >= 2");
  if (generating) {
    if (dim < 1) throw ConfigError("'dim' must be >= 1");
    if (means.empty() && dim < 2) throw ConfigError("circle means need dim >= 2");
    if (!means.empty()) {
      if (means.size() != static_cast<std::size_t>(classes)) {
        throw ConfigError("'means' lists " + std::to_string(means.size()) + " vectors for " +
                          std::to_string(classes) + " classes");
      }
      for (const auto& m : means) {
        if (m.size() != dim) throw ConfigError("every mean needs 'dim' coordinates");
      }
    }
    if (!(stddev > 0.0)) throw ConfigError("'stddev' must be > 0");
    if (!(ratio >= 1.0)) throw ConfigError("'ratio' must be >= 1");
    if (n_max < 1) throw ConfigError("'n_max' must be >= 1");
    if (!train_counts.empty()) {
      if (train_counts.size() != static_cast<std::size_t>(classes)) {
        throw ConfigError("'train_counts' needs one entry per class");
      }
      for (const auto c : train_counts) {
        if (c < 1) throw ConfigError("'train_counts' entries must be >= 1");
      }
    }
    if (val_per_class < 1 || test_per_class < 1) {
      throw ConfigError("'val_per_class' and 'test_per_class' must be >= 1");
    }
    try {
      (void)planned_train_counts();
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }

  if (training) {
    if (!(lr_base > 0.0)) throw ConfigError("'lr_base' must be > 0");
    if (epochs < 1) throw ConfigError("'epochs' must be >= 1");
    if (batch_size < 1) throw ConfigError("'batch_size' must be >= 1");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("'momentum' must be in [0, 1)");
    if (!(weight_decay >= 0.0)) throw ConfigError("'weight_decay' must be >= 0");
    if (!(focal_gamma >= 0.0)) throw ConfigError("'focal_gamma' must be >= 0");
    if (hidden.empty()) throw ConfigError("'hidden' needs at least one width");
    for (const auto h : hidden) {
      if (h < 1) throw ConfigError("'hidden' widths must be >= 1");
    }
  }
  if (command == Command::Train && loss == LossKind::MseOutlying) {
    if (!alpha) throw ConfigError("loss mse-ol requires 'alpha'");
    if (!(*alpha > 0.0)) throw ConfigError("'alpha' must be > 0 for mse-ol");
  }
  if (command == Command::SweepAlpha) {
    if (alpha_candidates.empty()) throw ConfigError("'alpha_candidates' is empty");
    for (const double a : alpha_candidates) {
      if (!(a > 0.0)) throw ConfigError("'alpha_candidates' entries must be > 0");
    }
  }
  if (command == Command::DumpFeatures || command == Command::Evaluate) {
    if (split != "train" && split != "val" && split != "test") {
      throw ConfigError("'split' must be train, val or test");
    }
  }
}

void ExperimentConfig::write(std::ostream& out) const {
  for (const auto& f : fields()) {
    const auto value = f.get(*this);
    out << f.key << " =";
    if (!value.empty()) out << ' ' << value;
    out << '\n';
  }
}

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
  ExperimentConfig config;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(row) + ": expected 'key = value'");
    }
    try {
      config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(row) + ": " + e.what());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_config(in, path.string());
}

}  // namespace mseol::cli
