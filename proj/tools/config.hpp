#pragma once

// YAML experiment configuration. Every accessor names the offending field and
// its line when the file does not match the schema documented in configs/README.md.

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "lognls/lognls.hpp"

namespace lognls::cli {

[[noreturn]] inline void config_fail(const std::string& what) { fail(ErrorKind::ConfigInvalid, what); }

class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {}

  static Section load(const std::filesystem::path& file) {
    try {
      YAML::Node root = YAML::LoadFile(file.string());
      if (!root.IsMap()) config_fail(file.string() + ": top level must be a mapping");
      return Section(root, "");
    } catch (const YAML::BadFile&) {
      config_fail("cannot read config file " + file.string());
    } catch (const YAML::ParserException& e) {
      config_fail(file.string() + ": line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
  }

  static Section parse(const std::string& text) {
    try {
      return Section(YAML::Load(text), "");
    } catch (const YAML::ParserException& e) {
      config_fail("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
  }

  bool has(const std::string& key) const { return node_.IsMap() && node_[key].IsDefined() && !node_[key].IsNull(); }

  std::string where(const std::string& key) const {
    const std::string name = path_.empty() ? key : path_ + "." + key;
    const auto m = has(key) ? node_[key].Mark() : node_.Mark();
    return "field '" + name + "'" + (m.line >= 0 ? " (line " + std::to_string(m.line + 1) + ")" : "");
  }

  double number(const std::string& key) const {
    if (!has(key)) config_fail("missing " + where(key));
    try {
      return node_[key].as<double>();
    } catch (const YAML::Exception&) {
      config_fail(where(key) + ": expected a number");
    }
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  long integer(const std::string& key) const {
    if (!has(key)) config_fail("missing " + where(key));
    try {
      return node_[key].as<long>();
    } catch (const YAML::Exception&) {
      config_fail(where(key) + ": expected an integer");
    }
  }
  long integer(const std::string& key, long fallback) const { return has(key) ? integer(key) : fallback; }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    try {
      return node_[key].as<std::string>();
    } catch (const YAML::Exception&) {
      config_fail(where(key) + ": expected a string");
    }
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    try {
      return node_[key].as<bool>();
    } catch (const YAML::Exception&) {
      config_fail(where(key) + ": expected true or false");
    }
  }

  /// A scalar is broadcast to `size` entries; size < 0 accepts any length.
  std::vector<double> numbers(const std::string& key, int size = -1) const {
    if (!has(key)) config_fail("missing " + where(key));
    const YAML::Node n = node_[key];
    std::vector<double> out;
    try {
      if (n.IsScalar()) {
        out.assign(size < 0 ? 1 : size, n.as<double>());
      } else if (n.IsSequence()) {
        for (const auto& e : n) out.push_back(e.as<double>());
      } else {
        config_fail(where(key) + ": expected a number or a list of numbers");
      }
    } catch (const YAML::Exception&) {
      config_fail(where(key) + ": expected numbers");
    }
    if (size >= 0 && static_cast<int>(out.size()) != size)
      config_fail(where(key) + ": expected " + std::to_string(size) + " entries, got " +
                  std::to_string(out.size()));
    return out;
  }

  Section sub(const std::string& key) const {
    if (!has(key)) config_fail("missing " + where(key));
    if (!node_[key].IsMap()) config_fail(where(key) + ": expected a mapping");
    return Section(node_[key], path_.empty() ? key : path_ + "." + key);
  }

  std::vector<Section> list(const std::string& key) const {
    if (!has(key)) config_fail("missing " + where(key));
    if (!node_[key].IsSequence()) config_fail(where(key) + ": expected a list");
    std::vector<Section> out;
    std::size_t i = 0;
    for (const auto& e : node_[key]) {
      const std::string p = (path_.empty() ? key : path_ + "." + key) + "[" + std::to_string(i++) + "]";
      if (!e.IsMap()) config_fail("field '" + p + "': expected a mapping");
      out.emplace_back(e, p);
    }
    return out;
  }

  const YAML::Node& node() const { return node_; }

 private:
  YAML::Node node_;
  std::string path_;
};

inline nlohmann::json to_json(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Map: {
      nlohmann::json j = nlohmann::json::object();
      for (const auto& kv : n) j[kv.first.as<std::string>()] = to_json(kv.second);
      return j;
    }
    case YAML::NodeType::Sequence: {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& e : n) j.push_back(to_json(e));
      return j;
    }
    case YAML::NodeType::Scalar: {
      const std::string s = n.Scalar();
      if (n.Tag() != "!") {
        try {
          std::size_t pos = 0;
          const double v = std::stod(s, &pos);
          if (pos == s.size()) return v;
        } catch (const std::exception&) {
        }
        if (s == "true") return true;
        if (s == "false") return false;
      }
      return s;
    }
    default:
      return nullptr;
  }
}

// ---------------------------------------------------------------------------
// Schema pieces shared by the subcommands.

inline Grid parse_grid(const Section& s, int dim) {
  Grid g;
  g.dim = static_cast<int>(s.integer("dim", dim));
  if (g.dim != dim) config_fail(s.where("dim") + ": differs from the experiment dimension");
  g.extent = s.number("extent");
  g.n = static_cast<int>(s.integer("n"));
  try {
    g.validate();
  } catch (const Error& e) {
    config_fail(s.where("n") + ": " + e.what());
  }
  return g;
}

inline SolverConfig parse_solver(const Section& root, double lambda) {
  SolverConfig c;
  c.lambda = lambda;
  if (!root.has("solver")) return c;
  const Section s = root.sub("solver");
  c.dt = s.number("dt", c.dt);
  c.eps = s.number("eps", c.eps);
  c.tail_tol = s.number("tail_tol", c.tail_tol);
  c.dealias = s.flag("dealias", c.dealias);
  c.monitor = s.flag("monitor", c.monitor);
  const std::string split = s.text("splitting", "strang");
  if (split == "strang")
    c.splitting = Splitting::Strang;
  else if (split == "lie")
    c.splitting = Splitting::Lie;
  else
    config_fail(s.where("splitting") + ": expected 'strang' or 'lie'");
  if (!(c.dt > 0.0)) config_fail(s.where("dt") + ": must be positive");
  return c;
}

inline RVector to_rvector(const std::vector<double>& v) {
  return Eigen::Map<const RVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// A member: Gausson by default, a breather with `alpha: [r, i]` (d = 1), or a
/// general Gaussian with `A_in: {re: [[...]], im: [[...]]}`.
inline GaussianParams parse_member(const Section& s, int dim, double lambda) {
  GaussianParams p;
  p.dim = dim;
  p.lambda = lambda;
  p.omega = s.number("omega", 0.0);
  p.theta = s.number("theta", 0.0);
  p.x0 = s.has("x0") ? to_rvector(s.numbers("x0", dim)) : RVector::Zero(dim);
  p.v = s.has("v") ? to_rvector(s.numbers("v", dim)) : RVector::Zero(dim);
  if (s.has("alpha")) {
    if (dim != 1) config_fail(s.where("alpha") + ": breather members need dim = 1");
    const auto a = s.numbers("alpha", 2);
    if (!(a[0] > 0.0)) config_fail(s.where("alpha") + ": alpha_r must be positive");
    const auto b = GaussianParams::breather(lambda, a[0], a[1], p.omega, p.x0[0], p.v[0], p.theta);
    p.A_in = b.A_in;
  } else if (s.has("A_in")) {
    const Section a = s.sub("A_in");
    p.A_in = CMatrix::Zero(dim, dim);
    for (const char* part : {"re", "im"}) {
      if (!a.has(part)) continue;
      const YAML::Node rows = a.node()[part];
      if (!rows.IsSequence() || static_cast<int>(rows.size()) != dim)
        config_fail(a.where(part) + ": expected " + std::to_string(dim) + " rows");
      for (int i = 0; i < dim; ++i) {
        if (!rows[i].IsSequence() || static_cast<int>(rows[i].size()) != dim)
          config_fail(a.where(part) + ": row " + std::to_string(i) + " needs " +
                      std::to_string(dim) + " entries");
        for (int j = 0; j < dim; ++j) {
          const double v = rows[i][j].as<double>();
          if (part[0] == 'r')
            p.A_in(i, j).real(v);
          else
            p.A_in(i, j).imag(v);
        }
      }
    }
  } else {
    p.A_in = CMatrix::Identity(dim, dim) * cdouble(2.0 * lambda, 0.0);
  }
  try {
    p.validate(true);
  } catch (const Error& e) {
    config_fail(s.where("A_in") + ": " + e.what());
  }
  return p;
}

inline MultiConfig parse_multi(const Section& root, double lambda, int dim) {
  MultiConfig cfg;
  for (const auto& m : root.list("members")) cfg.members.push_back(parse_member(m, dim, lambda));
  if (root.has("T_n")) cfg.T_n_list = root.numbers("T_n");
  cfg.sample_dt = root.number("sample_dt", cfg.sample_dt);
  if (root.has("T_obs")) cfg.T_obs = root.number("T_obs");
  cfg.margin_widths = root.number("margin_widths", cfg.margin_widths);
  try {
    cfg.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) config_fail(std::string("members/T_n: ") + e.what());
    throw;
  }
  return cfg;
}

}  // namespace lognls::cli
