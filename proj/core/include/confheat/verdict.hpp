#pragma once

namespace confheat {

/// Outcome of a statistical or oracle check.
enum class Verdict { kPass, kFail, kInconclusive };

const char* to_string(Verdict v);

/// Worst of two verdicts: fail beats inconclusive beats pass.
Verdict combine(Verdict a, Verdict b);

}  // namespace confheat
