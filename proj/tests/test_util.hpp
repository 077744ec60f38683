#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ncofdm/config.hpp"

namespace testutil {

/// Rows of a CSV fixture with '#' comment lines and the header dropped.
inline std::vector<std::vector<std::string>> read_fixture(const std::string& name)
{
    std::ifstream in(std::string(NCOFDM_FIXTURE_DIR) + "/" + name);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

inline double max_abs(const ncofdm::CVector& v)
{
    return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace testutil
