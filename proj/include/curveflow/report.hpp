#pragma once

#include <string>
#include <vector>

#include "curveflow/curve.hpp"

namespace curveflow {

/// One per-step record of the run series (series.csv schema).
struct SeriesRow {
    long step = 0;
    double t = 0.0;
    double total = 0.0;
    double bending = 0.0;
    double coupling = 0.0;
    double length = 0.0;
    double v_l2 = 0.0;
    double bc0 = 0.0;
    double bc1 = 0.0;
    double min_h = 0.0;
};

struct Series {
    std::vector<SeriesRow> rows;

    bool empty() const { return rows.empty(); }
    std::size_t size() const { return rows.size(); }
    const SeriesRow& operator[](std::size_t i) const { return rows[i]; }
};

enum class Termination { stationary, t_end, max_steps, error };

std::string to_string(Termination t);
Termination termination_from_string(const std::string& s);

struct Violation {
    long step = 0;
    std::string invariant;
    double magnitude = 0.0;
};

struct RunReport {
    Series series;
    std::vector<Violation> violations;
    Termination termination = Termination::error;
    std::string error_message;
    DiscreteCurve final_curve;
    double initial_energy = 0.0;     // W_lambda(f_0)
    double chord = 0.0;              // |f_plus - f_minus|
    double stationarity_tol = 0.0;   // resolved tolerance actually used
    std::vector<long> redistribution_steps;
};

} // namespace curveflow
