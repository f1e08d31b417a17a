// Homology of (Z --2--> Z) tensored with itself, and its torus invariant.
#include <iostream>

#include "quiltsign/floer.hpp"

using namespace quiltsign;

namespace {

void print(const char* title, const floer::IntComplex& c) {
  std::cout << title << " (" << c.size() << " generators)\n";
  for (const auto& h : floer::homology(c)) {
    std::cout << "  H^" << h.degree << ": ";
    bool any = false;
    if (h.free_rank > 0) std::cout << "Z^" << h.free_rank, any = true;
    for (const auto& t : h.torsion) std::cout << (any ? " + " : "") << "Z/" << t, any = true;
    std::cout << (any ? "" : "0") << "\n";
  }
}

}  // namespace

int main() {
  ZMatrix m(2, 2);
  m(1, 0) = 2;
  const auto a = floer::make_complex({{"a0", 0, std::nullopt}, {"a1", 1, std::nullopt}}, m, 0);
  print("A", a);
  const auto aa = floer::graded_tensor(a, a);
  print("A (x) A", aa);
  std::cout << "d^2 = 0: " << (floer::verify_d_squared(aa).ok ? "yes" : "no") << "\n";

  // the same complex with Z/2 grading
  const auto a2 = floer::make_complex({{"a0", 0, std::nullopt}, {"a1", 1, std::nullopt}}, m, 2);
  const auto t = floer::torus_invariant(floer::graded_tensor(a2, a2));
  std::cout << "torus invariant: chain " << t.chain << ", homology " << t.homology << "\n";
}
