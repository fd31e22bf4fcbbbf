#include "anw/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace anw {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& key, const std::string& text) {
  double value = 0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ValidationError("config: '" + key + "' is not a number: '" + text + "'");
  return value;
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text) {
  ConfigFile cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const std::string line = trim(text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
    ++line_no;
    pos = (end == std::string_view::npos) ? text.size() + 1 : end + 1;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw ValidationError("config line " + std::to_string(line_no) + ": empty key");
    cfg.values_[key] = trim(std::string_view(line).substr(eq + 1));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<std::string> ConfigFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? parse_double(key, *v) : fallback;
}

int ConfigFile::get_int(const std::string& key, int fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), value);
  if (ec != std::errc() || ptr != v->data() + v->size() || v->empty())
    throw ValidationError("config: '" + key + "' is not an integer: '" + *v + "'");
  return value;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1") return true;
  if (*v == "false" || *v == "0") return false;
  throw ValidationError("config: '" + key + "' must be true or false");
}

std::vector<std::string> ConfigFile::get_strings(const std::string& key) const {
  std::vector<std::string> out;
  const auto v = get(key);
  if (!v) return out;
  std::size_t pos = 0;
  while (pos <= v->size()) {
    const auto comma = v->find(',', pos);
    const std::string item = trim(std::string_view(*v).substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<double> ConfigFile::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : get_strings(key)) out.push_back(parse_double(key, s));
  return out;
}

ArrayConfig<double> array_config_from(const ConfigFile& cfg) {
  ArrayConfig<double> c = ArrayConfig<double>::homogeneous(cfg.get_int("array.N", 5), cfg.get_double("array.C0", 0.70),
                                                           cfg.get_double("array.eta", 0.025));
  if (cfg.has("array.f")) {
    const auto f = cfg.get_doubles("array.f");
    c.profile = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
  }
  c.validate();
  return c;
}

std::vector<double> z_grid(double start, double stop, int steps) {
  if (steps < 1) throw ValidationError("z grid: steps must be >= 1");
  if (!(start >= 0) || !(stop >= start)) throw ValidationError("z grid: need 0 <= start <= stop");
  std::vector<double> z(steps);
  if (steps == 1) {
    z[0] = start;
    return z;
  }
  for (int i = 0; i < steps; ++i) z[i] = start + (stop - start) * static_cast<double>(i) / (steps - 1);
  z.back() = stop;
  return z;
}

}  // namespace anw
