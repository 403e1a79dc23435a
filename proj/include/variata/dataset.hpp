#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace variata {

// Column roles for CSV ingestion.
struct Roles {
  std::string x;
  std::string y;
  std::vector<std::string> z;
  std::vector<std::string> w;
  std::set<std::string> categorical;
};

// Parses the roles file:
//   x = treat
//   y = outcome
//   z = age, sex
//   w = income
//   categorical = sex
Roles parse_roles(const std::string& text);
Roles load_roles(const std::string& path);
std::string roles_text(const Roles& r);

struct Dataset {
  std::string x_name = "X";
  std::string y_name = "Y";
  std::vector<std::string> z_names;
  std::vector<std::string> w_names;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::vector<double>> z;  // z[j][i]: column j, row i
  std::vector<std::vector<double>> w;
  // Categorical columns: code -> label.
  std::map<std::string, std::vector<std::string>> codebook;
  std::vector<std::string> notes;

  std::size_t n() const { return x.size(); }
  std::size_t dz() const { return z.size(); }
  std::size_t dw() const { return w.size(); }
  bool y_binary() const;
  // Every Z column is categorical or integer-valued with few levels.
  bool z_discrete() const;
  bool w_discrete() const;
  Dataset subset(const std::vector<std::size_t>& rows) const;
  Roles roles() const;
  // Checks lengths, binary X and finiteness; throws DataError.
  void validate() const;
};

Dataset parse_csv(const std::string& text, const Roles& roles);
Dataset ingest_csv(const std::string& path, const Roles& roles);
std::string to_csv(const Dataset& d);
void write_csv(const Dataset& d, const std::string& path);

}  // namespace variata
