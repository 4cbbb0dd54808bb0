// SPDX-License-Identifier: Apache-2.0
//
// mmxr - millimeter-wave interactive XR downlink simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "mmxr/codebook.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace mmxr
{

const Awv &Codebook::awv(std::size_t id) const
{
    if (id < sectors.size())
        return sectors[id].awv;
    if (id == sectors.size())
        return quasi_omni;
    throw std::out_of_range("Codebook::awv: sweep slot " + std::to_string(id) + " out of range");
}

void Codebook::validate() const
{
    try
    {
        geometry.validate();
    }
    catch (const std::invalid_argument &e)
    {
        throw CodebookStructureError(e.what());
    }
    std::set<int> ids;
    for (const Sector &s : sectors)
    {
        if (!ids.insert(s.id).second)
            throw CodebookStructureError("duplicate sector id " + std::to_string(s.id));
        if (s.awv.size() != geometry.size())
            throw CodebookStructureError("sector " + std::to_string(s.id) + " has " + std::to_string(s.awv.size()) +
                                         " phases, expected " + std::to_string(geometry.size()));
    }
    if (quasi_omni.size() != geometry.size())
        throw CodebookStructureError("quasi-omni AWV has " + std::to_string(quasi_omni.size()) + " phases, expected " +
                                     std::to_string(geometry.size()));
}

std::vector<double> default_sector_angles() { return {-50.0, -30.0, -10.0, 10.0, 30.0, 50.0}; }

Codebook generate_sector_codebook(const ArrayGeometry &geometry, const std::vector<double> &azimuths,
                                  const std::vector<double> &elevations, Awv quasi_omni)
{
    geometry.validate();
    if (azimuths.empty() || elevations.empty())
        throw std::invalid_argument("generate_sector_codebook: azimuth and elevation lists must be nonempty");
    Codebook cb;
    cb.geometry = geometry;
    int id = 0;
    for (double el : elevations)
        for (double az : azimuths)
        {
            const Direction aim{az, el};
            cb.sectors.push_back({id++, aim, steering_phases(geometry, aim)});
        }
    cb.quasi_omni = quasi_omni.size() == 0 ? Awv::zeros(geometry.size()) : std::move(quasi_omni);
    cb.validate();
    return cb;
}

namespace
{

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void format_phases(std::ostringstream &os, const ArrayGeometry &g, const Awv &awv)
{
    for (int r = 0; r < g.rows; ++r)
    {
        for (int c = 0; c < g.cols; ++c)
        {
            if (c)
                os << ' ';
            os << format_double(awv.phases[static_cast<std::size_t>(r * g.cols + c)]);
        }
        os << '\n';
    }
}

std::vector<std::string> split_ws(const std::string &line)
{
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok)
        out.push_back(tok);
    return out;
}

double parse_number(const std::string &tok, std::size_t line)
{
    // strtod accepts the exponent/inf/nan spellings we write; reject trailing garbage
    errno = 0;
    char *end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        throw CodebookParseError(line, "expected a finite number, got '" + tok + "'");
    return v;
}

int parse_int(const std::string &tok, std::size_t line)
{
    int v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw CodebookParseError(line, "expected an integer, got '" + tok + "'");
    return v;
}

} // namespace

std::string format_codebook(const Codebook &codebook)
{
    codebook.validate();
    const ArrayGeometry &g = codebook.geometry;
    std::ostringstream os;
    os << "# mmxr codebook: rows cols spacing_wavelengths carrier_hz\n";
    os << g.rows << ' ' << g.cols << ' ' << format_double(g.spacing) << ' ' << format_double(g.carrier_frequency)
       << '\n';
    for (const Sector &s : codebook.sectors)
    {
        os << "SECTOR " << s.id << ' ' << format_double(s.aim.azimuth) << ' ' << format_double(s.aim.elevation)
           << '\n';
        format_phases(os, g, s.awv);
    }
    os << "QUASIOMNI\n";
    format_phases(os, g, codebook.quasi_omni);
    return os.str();
}

Codebook parse_codebook(const std::string &text)
{
    Codebook cb;
    bool have_header = false;
    bool have_quasi_omni = false;

    // Block currently collecting phases: a sector index or the quasi-omni slot.
    enum class Target
    {
        none,
        sector,
        quasi_omni
    };
    Target target = Target::none;
    std::size_t block_line = 0;
    std::vector<double> phases;

    auto close_block = [&]() {
        if (target == Target::none)
            return;
        if (phases.size() != cb.geometry.size())
            throw CodebookStructureError("block starting at line " + std::to_string(block_line) + " has " +
                                         std::to_string(phases.size()) + " phases, header declares " +
                                         std::to_string(cb.geometry.rows) + "x" + std::to_string(cb.geometry.cols));
        if (target == Target::sector)
            cb.sectors.back().awv = Awv(std::move(phases));
        else
            cb.quasi_omni = Awv(std::move(phases));
        phases.clear();
        target = Target::none;
    };

    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        const auto toks = split_ws(line);
        if (toks.empty() || toks.front().starts_with('#'))
            continue;
        if (!have_header)
        {
            if (toks.size() != 4)
                throw CodebookParseError(lineno, "header must be 'rows cols spacing freq'");
            cb.geometry.rows = parse_int(toks[0], lineno);
            cb.geometry.cols = parse_int(toks[1], lineno);
            cb.geometry.spacing = parse_number(toks[2], lineno);
            cb.geometry.carrier_frequency = parse_number(toks[3], lineno);
            try
            {
                cb.geometry.validate();
            }
            catch (const std::invalid_argument &e)
            {
                throw CodebookParseError(lineno, e.what());
            }
            have_header = true;
            continue;
        }
        if (toks.front() == "SECTOR")
        {
            close_block();
            if (have_quasi_omni)
                throw CodebookParseError(lineno, "SECTOR after QUASIOMNI");
            if (toks.size() != 4)
                throw CodebookParseError(lineno, "expected 'SECTOR id aim_az aim_el'");
            Sector s;
            s.id = parse_int(toks[1], lineno);
            s.aim = {parse_number(toks[2], lineno), parse_number(toks[3], lineno)};
            cb.sectors.push_back(std::move(s));
            target = Target::sector;
            block_line = lineno;
            continue;
        }
        if (toks.front() == "QUASIOMNI")
        {
            close_block();
            if (have_quasi_omni)
                throw CodebookParseError(lineno, "duplicate QUASIOMNI block");
            if (toks.size() != 1)
                throw CodebookParseError(lineno, "unexpected tokens after QUASIOMNI");
            have_quasi_omni = true;
            target = Target::quasi_omni;
            block_line = lineno;
            continue;
        }
        if (target == Target::none)
            throw CodebookParseError(lineno, "phase values outside a SECTOR or QUASIOMNI block");
        for (const auto &tok : toks)
            phases.push_back(parse_number(tok, lineno));
    }
    if (!have_header)
        throw CodebookParseError(lineno, "missing header line");
    close_block();
    if (!have_quasi_omni)
        throw CodebookStructureError("missing QUASIOMNI block");
    cb.validate();
    return cb;
}

void write_codebook(const Codebook &codebook, const std::filesystem::path &path)
{
    const std::string text = format_codebook(codebook);
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("write_codebook: cannot open " + path.string());
    os << text;
    if (!os)
        throw std::runtime_error("write_codebook: write failed for " + path.string());
}

Codebook read_codebook(const std::filesystem::path &path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("read_codebook: cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_codebook(ss.str());
}

} // namespace mmxr
