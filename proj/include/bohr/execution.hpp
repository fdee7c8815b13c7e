#pragma once

namespace bohr {

/// Selects the OpenMP kernel or its serial reference. Both produce bitwise
/// identical results: parallel loops write into index-addressed slots and
/// every reduction runs serially in index order.
enum class Execution { serial, parallel };

}  // namespace bohr
