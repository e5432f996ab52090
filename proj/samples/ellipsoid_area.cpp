// Averaged sphere area on the ellipsoid against the flat comparison bound,
// written as a CSV report.

#include "riemlab/catalog.hpp"
#include "riemlab/report.hpp"
#include "riemlab/theorems.hpp"

#include <iostream>

int main() {
  using namespace riemlab;
  theorems::Workspace ws(catalog::make("ellipsoid"), theorems::RunSettings{2000, 7, 0.0, 0});
  theorems::Params p;
  p.k = 0.0;
  std::vector<theorems::BoundReport> rows;
  for (double r : {0.2, 0.4, 0.8}) {
    p.r = r;
    for (auto& b : theorems::check_average_area(ws, p)) rows.push_back(b);
  }
  report::write_csv(std::cout, rows);
  return report::exit_code(rows);
}
