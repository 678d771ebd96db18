#pragma once

// Text, JSON and CSV renderings of estimation results.

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "powergain/estimator.hpp"
#include "powergain/pipeline.hpp"
#include "powergain/simulate.hpp"

namespace powergain::cli {

enum class Format { Text, Json, Csv };

/// Throws std::invalid_argument on anything but text, json, csv.
Format parse_format(const std::string& name);

std::string render_text(const EstimateReport& r);
std::string render_csv(const EstimateReport& r);

/// NaN and absent optionals are written as null.
nlohmann::json to_json(const EstimateReport& r);
EstimateReport report_from_json(const nlohmann::json& j);

std::string render_curve(std::span<const CurvePoint> curve, Format format);
std::string render_coverage(std::span<const sim::CoverageRow> rows, Format format);
std::string render_conditional(const ConditionalResult& result, double c2, const std::string& se_mode,
                               Format format);

}  // namespace powergain::cli
