// Counts of relative structures for the built-in cell maps.
#include <iomanip>
#include <iostream>

#include "quiltsign/cohom.hpp"
#include "quiltsign/fixtures.hpp"

using namespace quiltsign;

int main() {
  std::cout << std::left << std::setw(24) << "map" << std::setw(8) << "H^0" << std::setw(8) << "H^1" << std::setw(8)
            << "H^2" << "count\n";
  for (const auto& fx : fixtures::cone_fixtures()) {
    std::cout << std::setw(24) << fx.name;
    for (int k = 0; k <= 2; ++k) std::cout << std::setw(8) << cohom::cone_cohomology(fx.cone, k);
    std::cout << cohom::count_relative_spin(fx.cone, fx.w2) << "\n";
  }
}
