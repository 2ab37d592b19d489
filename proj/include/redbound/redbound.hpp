#pragma once

// Everything except the JSON layer (io.hpp, report.hpp), which needs
// nlohmann/json on the include path.

#include "redbound/linalg.hpp"
#include "redbound/states.hpp"
#include "redbound/entropy.hpp"
#include "redbound/symext.hpp"
#include "redbound/bounds.hpp"
#include "redbound/zoo.hpp"
