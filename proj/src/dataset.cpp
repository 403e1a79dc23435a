#include "variata/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "variata/error.hpp"

namespace variata {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_number(const std::string& s, double& v) {
  std::string t = trim(s);
  if (t.empty()) return false;
  const char* b = t.data();
  const char* e = t.data() + t.size();
  if (*b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  return ec == std::errc() && p == e && std::isfinite(v);
}

std::string format_number(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

bool discrete_columns(const std::vector<std::vector<double>>& cols, const std::vector<std::string>& names,
                      const std::map<std::string, std::vector<std::string>>& codebook) {
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (codebook.count(names[j])) continue;
    std::set<double> levels;
    for (double v : cols[j]) {
      if (v != std::floor(v)) return false;
      levels.insert(v);
      if (levels.size() > 50) return false;
    }
  }
  return true;
}

}  // namespace

Roles parse_roles(const std::string& text) {
  Roles r;
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty() || line[0] == '[') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("roles entry needs key = value", ln);
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
    if (key == "x")
      r.x = val;
    else if (key == "y")
      r.y = val;
    else if (key == "z")
      r.z = split_list(val);
    else if (key == "w")
      r.w = split_list(val);
    else if (key == "categorical") {
      for (const auto& c : split_list(val)) r.categorical.insert(c);
    } else
      throw ParseError("unknown roles key '" + key + "'", ln);
  }
  if (r.x.empty()) throw ParseError("roles file must name the x column");
  if (r.y.empty()) throw ParseError("roles file must name the y column");
  return r;
}

Roles load_roles(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open roles file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_roles(ss.str());
}

std::string roles_text(const Roles& r) {
  auto join = [](const auto& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
    return s;
  };
  std::string s = "x = " + r.x + "\ny = " + r.y + "\n";
  s += "z = " + join(r.z) + "\n";
  s += "w = " + join(r.w) + "\n";
  if (!r.categorical.empty()) s += "categorical = " + join(r.categorical) + "\n";
  return s;
}

bool Dataset::y_binary() const {
  return std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

bool Dataset::z_discrete() const { return discrete_columns(z, z_names, codebook); }
bool Dataset::w_discrete() const { return discrete_columns(w, w_names, codebook); }

Roles Dataset::roles() const {
  Roles r;
  r.x = x_name;
  r.y = y_name;
  r.z = z_names;
  r.w = w_names;
  for (const auto& [k, v] : codebook) r.categorical.insert(k);
  return r;
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset d;
  d.x_name = x_name;
  d.y_name = y_name;
  d.z_names = z_names;
  d.w_names = w_names;
  d.codebook = codebook;
  d.x.reserve(rows.size());
  d.y.reserve(rows.size());
  d.z.assign(z.size(), {});
  d.w.assign(w.size(), {});
  for (std::size_t r : rows) {
    d.x.push_back(x[r]);
    d.y.push_back(y[r]);
    for (std::size_t j = 0; j < z.size(); ++j) d.z[j].push_back(z[j][r]);
    for (std::size_t j = 0; j < w.size(); ++j) d.w[j].push_back(w[j][r]);
  }
  return d;
}

void Dataset::validate() const {
  std::size_t n0 = x.size();
  if (y.size() != n0) throw DataError("Y column length differs from X");
  for (const auto& c : z)
    if (c.size() != n0) throw DataError("Z column length differs from X");
  for (const auto& c : w)
    if (c.size() != n0) throw DataError("W column length differs from X");
  for (std::size_t i = 0; i < n0; ++i) {
    if (x[i] != 0.0 && x[i] != 1.0)
      throw DataError("X must be binary {0,1}: row " + std::to_string(i + 1) + " has " + format_number(x[i]));
    if (!std::isfinite(y[i])) throw DataError("non-finite Y in row " + std::to_string(i + 1));
  }
}

Dataset parse_csv(const std::string& text, const Roles& roles) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty CSV input");
  std::vector<std::string> header = csv_fields(line);
  for (auto& h : header) h = trim(h);
  auto col_of = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("missing column '" + name + "' in CSV header");
    return static_cast<std::size_t>(it - header.begin());
  };
  std::size_t cx = col_of(roles.x), cy = col_of(roles.y);
  std::vector<std::size_t> cz, cw;
  for (const auto& n : roles.z) cz.push_back(col_of(n));
  for (const auto& n : roles.w) cw.push_back(col_of(n));
  for (const auto& c : roles.categorical) col_of(c);
  if (roles.categorical.count(roles.x) || roles.categorical.count(roles.y))
    throw DataError("X and Y must be numeric columns");

  std::vector<std::vector<std::string>> raw;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto f = csv_fields(line);
    if (f.size() != header.size())
      throw DataError("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(f.size()));
    raw.push_back(std::move(f));
  }

  Dataset d;
  d.x_name = roles.x;
  d.y_name = roles.y;
  d.z_names = roles.z;
  d.w_names = roles.w;

  auto numeric = [&](std::size_t col, const std::string& name) {
    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const std::string& cell = raw[i][col];
      if (trim(cell).empty())
        throw DataError("missing value in column '" + name + "' at row " + std::to_string(i + 2));
      if (!parse_number(cell, out[i]))
        throw DataError("non-numeric value '" + cell + "' in column '" + name + "' at row " +
                        std::to_string(i + 2) + " (declare it categorical?)");
    }
    return out;
  };
  auto categorical = [&](std::size_t col, const std::string& name) {
    std::set<std::string> labels;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      std::string cell = trim(raw[i][col]);
      if (cell.empty())
        throw DataError("missing value in column '" + name + "' at row " + std::to_string(i + 2));
      labels.insert(cell);
    }
    std::vector<std::string> book(labels.begin(), labels.end());
    std::map<std::string, double> code;
    for (std::size_t k = 0; k < book.size(); ++k) code[book[k]] = static_cast<double>(k);
    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = code[trim(raw[i][col])];
    d.codebook[name] = book;
    return out;
  };
  auto column = [&](std::size_t col, const std::string& name) {
    return roles.categorical.count(name) ? categorical(col, name) : numeric(col, name);
  };

  d.x = numeric(cx, roles.x);
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    if (d.x[i] != 0.0 && d.x[i] != 1.0)
      throw DataError("X must be binary {0,1}: column '" + roles.x + "' has value " +
                      format_number(d.x[i]) + " at row " + std::to_string(i + 2) +
                      " (remap the two treatment levels to 0 and 1)");
  }
  d.y = numeric(cy, roles.y);
  for (std::size_t j = 0; j < cz.size(); ++j) d.z.push_back(column(cz[j], roles.z[j]));
  for (std::size_t j = 0; j < cw.size(); ++j) d.w.push_back(column(cw[j], roles.w[j]));
  if (d.n() == 0) throw DataError("CSV has no data rows");
  return d;
}

Dataset ingest_csv(const std::string& path, const Roles& roles) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open data file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str(), roles);
}

std::string to_csv(const Dataset& d) {
  std::string out;
  std::vector<std::string> names;
  names.insert(names.end(), d.z_names.begin(), d.z_names.end());
  names.push_back(d.x_name);
  names.insert(names.end(), d.w_names.begin(), d.w_names.end());
  names.push_back(d.y_name);
  for (std::size_t k = 0; k < names.size(); ++k) out += (k ? "," : "") + names[k];
  out += "\n";
  auto cell = [&](const std::string& name, double v) {
    auto it = d.codebook.find(name);
    if (it != d.codebook.end()) return it->second.at(static_cast<std::size_t>(v));
    return format_number(v);
  };
  for (std::size_t i = 0; i < d.n(); ++i) {
    std::string line;
    for (std::size_t j = 0; j < d.dz(); ++j) line += cell(d.z_names[j], d.z[j][i]) + ",";
    line += format_number(d.x[i]);
    for (std::size_t j = 0; j < d.dw(); ++j) line += "," + cell(d.w_names[j], d.w[j][i]);
    line += "," + format_number(d.y[i]) + "\n";
    out += line;
  }
  return out;
}

void write_csv(const Dataset& d, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path + "'");
  f << to_csv(d);
}

}  // namespace variata
