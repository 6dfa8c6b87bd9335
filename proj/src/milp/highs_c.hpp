#pragma once

// Subset of the HiGHS C API (highs_c_api.h) used by the solver bridge.
// HighsInt is checked against Highs_getSizeofHighsInt() at run time.

#include <cstdint>

extern "C" {

using HighsInt = std::int32_t;

void* Highs_create(void);
void Highs_destroy(void* highs);
const char* Highs_version(void);
HighsInt Highs_getSizeofHighsInt(const void* highs);

HighsInt Highs_passLp(void* highs, HighsInt num_col, HighsInt num_row, HighsInt num_nz,
                      HighsInt a_format, HighsInt sense, double offset, const double* col_cost,
                      const double* col_lower, const double* col_upper, const double* row_lower,
                      const double* row_upper, const HighsInt* a_start, const HighsInt* a_index,
                      const double* a_value);
HighsInt Highs_passMip(void* highs, HighsInt num_col, HighsInt num_row, HighsInt num_nz,
                       HighsInt a_format, HighsInt sense, double offset, const double* col_cost,
                       const double* col_lower, const double* col_upper, const double* row_lower,
                       const double* row_upper, const HighsInt* a_start, const HighsInt* a_index,
                       const double* a_value, const HighsInt* integrality);

HighsInt Highs_setBoolOptionValue(void* highs, const char* option, HighsInt value);
HighsInt Highs_setIntOptionValue(void* highs, const char* option, HighsInt value);
HighsInt Highs_setDoubleOptionValue(void* highs, const char* option, double value);
HighsInt Highs_setStringOptionValue(void* highs, const char* option, const char* value);

HighsInt Highs_run(void* highs);
HighsInt Highs_getModelStatus(const void* highs);
double Highs_getObjectiveValue(const void* highs);
HighsInt Highs_getSolution(const void* highs, double* col_value, double* col_dual,
                           double* row_value, double* row_dual);
HighsInt Highs_getIntInfoValue(const void* highs, const char* info, HighsInt* value);
HighsInt Highs_getDoubleInfoValue(const void* highs, const char* info, double* value);
}

namespace rruc::milp::highs {

inline constexpr HighsInt kStatusError = -1;
inline constexpr HighsInt kRowwise = 2;
inline constexpr HighsInt kMinimize = 1;
inline constexpr HighsInt kMaximize = -1;
inline constexpr HighsInt kInteger = 1;

// HighsModelStatus values.
inline constexpr HighsInt kModelEmpty = 6;
inline constexpr HighsInt kOptimal = 7;
inline constexpr HighsInt kInfeasible = 8;
inline constexpr HighsInt kUnboundedOrInfeasible = 9;
inline constexpr HighsInt kUnbounded = 10;
inline constexpr HighsInt kTimeLimit = 13;

inline constexpr HighsInt kSolutionFeasible = 2;

}  // namespace rruc::milp::highs
