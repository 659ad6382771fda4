// Writes the frozen synthetic count matrix and its digest:
//   ecomplex-fixture <m> <n> <noise> <seed> <out.csv>

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "ecomplex/csv.hpp"
#include "ecomplex/harness.hpp"
#include "ecomplex/pipeline.hpp"

int main(int argc, char** argv) {
  if (argc != 6) {
    std::cerr << "usage: ecomplex-fixture <m> <n> <noise> <seed> <out.csv>\n";
    return 2;
  }
  const ecomplex::harness::SynthSpec spec{std::atoi(argv[1]), std::atoi(argv[2]), std::atof(argv[3]),
                                          std::strtoull(argv[4], nullptr, 10)};
  std::ostringstream out;
  ecomplex::write_count_matrix(out, ecomplex::harness::gen_noisy_nested(spec));
  const std::string path = argv[5];
  ecomplex::csv::write_file_atomic(path, out.str());
  std::string digest_path = path;
  digest_path.replace(digest_path.rfind(".csv"), 4, ".fnv1a64");
  ecomplex::csv::write_file_atomic(digest_path, ecomplex::pipeline::checksum(out.str()) + "\n");
  return 0;
}
