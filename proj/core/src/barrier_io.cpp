#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "safeplan/barrier.hpp"

namespace safeplan {

void write_barrier_set(std::ostream& out, std::span<const BarrierFunction> barriers)
{
    for (const auto& bf : barriers) {
        std::string line = fmt::format("region {}; window {:.17g} {:.17g} {:.17g} {:.17g}; beta",
                                       bf.region_id, bf.window.min_x, bf.window.min_y,
                                       bf.window.max_x, bf.window.max_y);
        for (int k = 0; k < kNumFeatures; ++k)
            line += fmt::format(" {:.17g}", bf.beta[k]);
        out << line << '\n';
    }
}

namespace {

[[noreturn]] void bad_record(std::size_t line_no, const std::string& why)
{
    throw std::runtime_error(fmt::format("barrier file line {}: {}", line_no, why));
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<BarrierFunction> read_barrier_set(std::istream& in)
{
    std::vector<BarrierFunction> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;

        std::vector<std::string> fields;
        std::istringstream fs(line);
        for (std::string f; std::getline(fs, f, ';');)
            fields.push_back(trim(f));
        if (fields.size() != 3)
            bad_record(line_no, "expected 'region <id>; window x0 y0 x1 y1; beta b0 ... b14'");

        BarrierFunction bf;
        std::string tag, extra;
        {
            std::istringstream s(fields[0]);
            if (!(s >> tag >> bf.region_id) || tag != "region" || (s >> extra))
                bad_record(line_no, "bad region field");
        }
        {
            std::istringstream s(fields[1]);
            if (!(s >> tag >> bf.window.min_x >> bf.window.min_y >> bf.window.max_x >>
                  bf.window.max_y) ||
                tag != "window" || (s >> extra))
                bad_record(line_no, "bad window field");
        }
        {
            std::istringstream s(fields[2]);
            if (!(s >> tag) || tag != "beta")
                bad_record(line_no, "bad beta field");
            for (int k = 0; k < kNumFeatures; ++k) {
                std::string tok;
                if (!(s >> tok))
                    bad_record(line_no, "beta needs 15 coefficients");
                try {
                    std::size_t used = 0;
                    bf.beta[k] = std::stod(tok, &used);
                    if (used != tok.size())
                        throw std::invalid_argument(tok);
                } catch (const std::logic_error&) {
                    bad_record(line_no, "bad coefficient '" + tok + "'");
                }
                if (!std::isfinite(bf.beta[k]))
                    bad_record(line_no, "non-finite coefficient");
            }
            if (s >> extra)
                bad_record(line_no, "beta has more than 15 coefficients");
        }
        out.push_back(bf);
    }
    return out;
}

}  // namespace safeplan
