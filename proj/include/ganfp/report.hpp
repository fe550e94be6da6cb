#pragma once

#include "ganfp/certify.hpp"
#include "ganfp/iterate.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace ganfp {

using Json = nlohmann::ordered_json;

Json to_json(const Vector& v);
Vector vector_from_json(const Json& j);

/// Witness vectors are written with shortest round-trip formatting, so they
/// parse back to the identical doubles.
Json certificate_json(const GanCertificate& cert);
GanCertificate certificate_from_json(const Json& j);

Json fit_json(const RateFit& fit);
Json summability_json(const SummabilityReport& r);
Json sandwich_json(const SandwichReport& r);
Json little_o_json(const LittleOReport& r);

/// Writes `j` with two-space indentation and a trailing newline. Throws Error
/// if the file cannot be opened or written.
void write_json(const Json& j, const std::string& path);

/// CSV with '#' comment lines for metadata, then `k,residual,error_to_ref`.
/// One row per k = 0..k_final; the last row has an empty residual, and the
/// error column is empty throughout when the trace has no reference.
void write_trace_csv(const IterationTrace& trace, const std::string& path,
                     const std::vector<std::string>& extra_header = {});

/// '#' metadata lines, then one comma-separated 0/1 row per grid row,
/// starting at y_min.
void write_region_csv(const RegionGrid& grid, const std::string& path);

/// printf("%.17g").
std::string format_double(double v);

}  // namespace ganfp
