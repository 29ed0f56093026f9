#include "cfmac/channel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cfmac/errors.hpp"
#include "json.hpp"

namespace cfmac {

using nlohmann::json;

std::size_t DiscreteMac::num_inputs() const {
  std::size_t n = 1;
  for (int s : input_sizes) n *= static_cast<std::size_t>(s);
  return n;
}

std::size_t DiscreteMac::input_index(const std::vector<int>& x) const {
  if (static_cast<int>(x.size()) != k) throw ConfigError("input tuple has wrong length");
  std::size_t idx = 0;
  for (int j = 0; j < k; ++j) {
    if (x[j] < 0 || x[j] >= input_sizes[j]) throw std::out_of_range("input symbol out of range");
    idx = idx * input_sizes[j] + x[j];
  }
  return idx;
}

std::optional<Violation> validate(const DiscreteMac& mac) {
  if (mac.k <= 0) return Violation{"k must be positive", -1, static_cast<double>(mac.k)};
  if (static_cast<int>(mac.input_sizes.size()) != mac.k)
    return Violation{"input_sizes length differs from k", -1,
                     static_cast<double>(mac.input_sizes.size())};
  for (int s : mac.input_sizes)
    if (s <= 0) return Violation{"input alphabet size must be positive", -1, static_cast<double>(s)};
  if (mac.output_size <= 0)
    return Violation{"output_size must be positive", -1, static_cast<double>(mac.output_size)};
  const std::size_t rows = mac.num_inputs();
  if (mac.transition.size() != rows * mac.output_size)
    return Violation{"transition length differs from prod(input_sizes)*output_size", -1,
                     static_cast<double>(mac.transition.size())};
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (int y = 0; y < mac.output_size; ++y) {
      double v = mac.row(r)[y];
      if (!(v >= 0.0) || v > 1.0)
        return Violation{"transition entry outside [0,1]", static_cast<long>(r), v};
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) return Violation{"row does not sum to 1", static_cast<long>(r), sum};
  }
  if (!mac.costs.empty()) {
    if (static_cast<int>(mac.costs.size()) != mac.k)
      return Violation{"costs must list one entry per encoder", -1,
                       static_cast<double>(mac.costs.size())};
    for (int j = 0; j < mac.k; ++j) {
      const auto& c = mac.costs[j];
      if (static_cast<int>(c.table.size()) != mac.input_sizes[j])
        return Violation{"cost table does not cover the input alphabet", j,
                         static_cast<double>(c.table.size())};
      for (double b : c.table)
        if (!(b >= 0.0)) return Violation{"negative cost", j, b};
      if (!(c.budget >= 0.0)) return Violation{"negative budget", j, c.budget};
    }
  }
  return std::nullopt;
}

void require_valid(const DiscreteMac& mac) {
  if (auto v = validate(mac)) {
    std::ostringstream os;
    os << "invalid channel: " << v->what;
    if (v->row >= 0) os << " (row " << v->row << ")";
    os << " value=" << v->value;
    throw ConfigError(os.str());
  }
}

DiscreteMac make_binary_erasure_mac() {
  DiscreteMac m;
  m.k = 2;
  m.input_sizes = {2, 2};
  m.output_size = 3;
  m.transition.assign(12, 0.0);
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2) m.transition[(x1 * 2 + x2) * 3 + x1 + x2] = 1.0;
  return m;
}

DiscreteMac make_identity_channel(int alphabet) {
  DiscreteMac m;
  m.k = 1;
  m.input_sizes = {alphabet};
  m.output_size = alphabet;
  m.transition.assign(static_cast<std::size_t>(alphabet) * alphabet, 0.0);
  for (int x = 0; x < alphabet; ++x) m.transition[x * alphabet + x] = 1.0;
  return m;
}

DiscreteMac make_random_mac(const std::vector<int>& input_sizes, int output_size, Rng& rng) {
  DiscreteMac m;
  m.k = static_cast<int>(input_sizes.size());
  m.input_sizes = input_sizes;
  m.output_size = output_size;
  const std::size_t rows = m.num_inputs();
  m.transition.resize(rows * output_size);
  std::exponential_distribution<double> ex(1.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int y = 0; y < output_size; ++y) s += (m.transition[r * output_size + y] = ex(rng));
    for (int y = 0; y < output_size; ++y) m.transition[r * output_size + y] /= s;
  }
  return m;
}

int sample_output(const DiscreteMac& mac, const std::vector<int>& x, Rng& rng) {
  return sample_index(mac.row(mac.input_index(x)), mac.output_size, rng);
}

DiscreteMac channel_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("channel JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("channel JSON must be an object");
  for (const char* key : {"k", "input_sizes", "output_size", "transition"})
    if (!j.contains(key)) throw ConfigError(std::string("channel JSON missing key \"") + key + "\"");
  DiscreteMac m;
  try {
    m.k = j.at("k").get<int>();
    m.input_sizes = j.at("input_sizes").get<std::vector<int>>();
    m.output_size = j.at("output_size").get<int>();
    m.transition = j.at("transition").get<std::vector<double>>();
    if (j.contains("costs")) {
      for (const auto& c : j.at("costs")) {
        CostSpec cs;
        cs.table = c.at("table").get<std::vector<double>>();
        cs.budget = c.at("budget").get<double>();
        m.costs.push_back(std::move(cs));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("channel JSON schema error: ") + e.what());
  }
  require_valid(m);
  return m;
}

std::string channel_to_json_text(const DiscreteMac& mac) {
  json j;
  j["k"] = mac.k;
  j["input_sizes"] = mac.input_sizes;
  j["output_size"] = mac.output_size;
  j["transition"] = mac.transition;
  if (!mac.costs.empty()) {
    j["costs"] = json::array();
    for (const auto& c : mac.costs) j["costs"].push_back({{"table", c.table}, {"budget", c.budget}});
  }
  // nlohmann emits shortest round-trip doubles, so load(save(m)) is exact.
  return j.dump(2);
}

DiscreteMac load_channel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read channel file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return channel_from_json_text(ss.str());
}

void save_channel(const DiscreteMac& mac, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write channel file " + path);
  out << channel_to_json_text(mac) << "\n";
}

}  // namespace cfmac
