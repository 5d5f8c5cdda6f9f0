#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "uasd/types.hpp"

namespace uasd {

/// shortest decimal that round-trips to the same double
std::string formatDouble(double v);

void writeCsv(std::ostream& out, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows);

/// Plain-text complex matrix: header `rows cols`, then row-major lines of
/// re+imj tokens (e.g. `1.5-0.25j`).
void writeMatrix(std::ostream& out, const MatrixXcd& m);
MatrixXcd readMatrix(std::istream& in);

}  // namespace uasd
