#pragma once

#include <string>

#include "ladreg/dataset.hpp"

namespace ladreg {

// Reads `subject_id,x,y` records; rows may arrive in any order.  Subjects are
// canonicalized by id and each subject's points by (x, y), so shuffled input
// produces an identical Dataset.  [a,b] is inferred as [min x, max x].
Dataset ingest_csv(const std::string& path);

void export_csv(const Dataset& data, const std::string& path);

// Lossless double formatting (17 significant digits).
std::string format_double(double v);

}  // namespace ladreg
