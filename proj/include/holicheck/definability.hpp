#pragma once

#include <set>
#include <string>

#include "holicheck/concrete.hpp"
#include "holicheck/engine.hpp"
#include "holicheck/surface.hpp"

namespace holi {

/// A client that plays the Opponent side of one concrete trace.
struct SynthClient {
  std::string text;
  surface::SourceLibrary source;
};

/// Builds the client for a concrete trace of a library with public names `pub`
/// and abstract names `abs`. Client globals are prefixed so they avoid every
/// spelling in `reserved`. Throws IllFormedTrace.
SynthClient synthesize_client(const Trace& tau, const NameSet& pub, const NameSet& abs,
                              const std::set<std::string>& reserved = {});

/// True when no assert occurs anywhere in the client.
bool is_good_client(const surface::SourceLibrary& client);

/// Calls, returns and payload types well-formed; O and P alternate from O.
void validate_trace(const Trace& tau, const NameSet& pub, const NameSet& abs);

/// k0 * |tau| + 16.
int roundtrip_budget(int k0, const Trace& tau);

struct RoundTrip {
  bool reproduced = false;
  /// The linked run's boundary trace matches tau move for move.
  bool faithful = false;
  std::string diagnostic;
  SynthClient client;
  Trace boundary;
};

/// Concretizes the finding, synthesizes its client, links it with `lib` and
/// runs the result under `k_budget`. Reproduced iff the run fails.
RoundTrip verify_roundtrip(const TypedLibrary& lib, const Finding& f, const NameSet& pub, const NameSet& abs,
                           int k_budget);

/// Trace text with `keep` names printed as spelled and all others numbered by
/// first occurrence. Compares traces across separately typechecked programs.
std::string trace_shape(const Trace& tau, const std::set<std::string>& keep);

}  // namespace holi
