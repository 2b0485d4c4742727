#pragma once

#include <iosfwd>
#include <vector>

#include "bosonsim/sampler.hpp"

namespace bosonsim {

/// One JSON line per frame, keys in the order frame_id, t, eta, s, points; geometry fields are
/// null on the correlated path; doubles carry 17 significant digits.
void write_frame_jsonl(std::ostream& out, const Frame& frame);

/// Reads frames written by write_frame_jsonl. The basis is not stored in the file and is
/// attached to every geometry. Throws ParseError on malformed lines.
std::vector<Frame> read_frames_jsonl(std::istream& in, const ModeBasis& basis);

}  // namespace bosonsim
