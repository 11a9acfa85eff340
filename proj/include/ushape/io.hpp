#pragma once

#include <filesystem>
#include <iosfwd>

#include "ushape/estimators.hpp"
#include "ushape/regularize.hpp"

namespace ushape {

/// Reads observations for `model` from CSV with a header row:
///   density     x
///   regression  x,y
///   hazard      time,delta     (delta in {0,1}; times may exceed the horizon)
///   nhpp        time           (strictly increasing, within the horizon)
/// `domain` is the estimation interval; hazard and nhpp use [0, domain.b()]
/// and require domain.a() == 0. Throws ParseError naming the offending row.
Observations ingest(std::istream& in, Model model, const Interval& domain);
/// Throws IoError when the file cannot be opened.
Observations ingest_file(const std::filesystem::path& path, Model model, const Interval& domain);

/// Writes observations in the format `ingest` reads.
void write_observations(std::ostream& out, const Observations& data);

/// The estimate as a `t,value` step CSV followed by
/// `# mode=<m> shape=<kind> d=<d>`.
void write_estimate_csv(std::ostream& out, const ShapeEstimate& estimate);

}  // namespace ushape
