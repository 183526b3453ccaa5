#pragma once

namespace collapsemap {

/// Execution mode for the embarrassingly-parallel kernels. Serial is the
/// reference implementation; Parallel uses OpenMP and must produce
/// bit-identical results (per-trial substreams, fixed merge order).
enum class ExecMode { Serial, Parallel };

} // namespace collapsemap
