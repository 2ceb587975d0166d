#pragma once

#include "remo/error.hpp"
#include "remo/faults.hpp"
#include "remo/memory.hpp"
#include "remo/montgomery.hpp"
#include "remo/ntt.hpp"
#include "remo/params.hpp"
#include "remo/report.hpp"
#include "remo/rng.hpp"
#include "remo/trace_io.hpp"
