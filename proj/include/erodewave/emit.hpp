#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "erodewave/front_tracking.hpp"
#include "erodewave/transforms.hpp"

namespace erodewave {

inline constexpr const char* kVersion = "0.1.0";

/// 17 significant digits, so values round-trip exactly; "inf", "-inf" and "nan" otherwise.
std::string format_number(double v);

std::string profile_csv(const QProfile& p);
std::string series_csv(const std::vector<SeriesPoint>& series);
std::string physical_csv(const HeightCurve& curve);

nlohmann::json profile_json(const QProfile& p);
nlohmann::json series_json(const std::vector<SeriesPoint>& series);
nlohmann::json physical_json(const HeightCurve& curve);

/// Writes text to path, creating parent directories; throws std::runtime_error on failure.
void write_text(const std::string& path, const std::string& content);

}  // namespace erodewave
