#include "poirot/pointcloud_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace poirot {

namespace {

bool blank_or_comment(const std::string& line) {
    for (char c : line) {
        if (c == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

double parse_coord(const std::string& tok, const std::string& name, std::size_t line_no) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ParseError(name, line_no, "expected a number, got '" + tok + "'");
    }
    if (used != tok.size())
        throw ParseError(name, line_no, "trailing characters in number '" + tok + "'");
    if (!std::isfinite(v))
        throw ParseError(name, line_no, "non-finite coordinate '" + tok + "'");
    return v;
}

} // namespace

PointCloud read_xyz(std::istream& in, const std::string& name) {
    PointCloud cloud;
    std::string line;
    std::size_t line_no = 0;
    bool saw_normals = false, saw_labels = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank_or_comment(line)) continue;
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string tok;
        while (ls >> tok) toks.push_back(tok);
        if (toks.size() != 3 && toks.size() != 4 && toks.size() != 6 && toks.size() != 7)
            throw ParseError(name, line_no,
                             "expected 3, 4, 6 or 7 fields, got " + std::to_string(toks.size()));
        Vec3 p{parse_coord(toks[0], name, line_no), parse_coord(toks[1], name, line_no),
               parse_coord(toks[2], name, line_no)};
        cloud.points.push_back(p);
        std::size_t at = 3;
        if (toks.size() >= 6) {
            Vec3 nrm{parse_coord(toks[3], name, line_no), parse_coord(toks[4], name, line_no),
                     parse_coord(toks[5], name, line_no)};
            cloud.normals.push_back(nrm);
            saw_normals = true;
            at = 6;
        }
        if (toks.size() == at + 1) {
            cloud.labels.push_back(static_cast<int>(parse_coord(toks[at], name, line_no)));
            saw_labels = true;
        }
        if (saw_normals && cloud.normals.size() != cloud.points.size())
            throw ParseError(name, line_no, "inconsistent normal columns");
        if (saw_labels && cloud.labels.size() != cloud.points.size())
            throw ParseError(name, line_no, "inconsistent label columns");
    }
    cloud.validate();
    return cloud;
}

void write_xyz(std::ostream& out, const PointCloud& cloud) {
    out.precision(17);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3& p = cloud.points[i];
        out << p.x << ' ' << p.y << ' ' << p.z;
        if (cloud.has_normals()) {
            const Vec3& n = cloud.normals[i];
            out << ' ' << n.x << ' ' << n.y << ' ' << n.z;
        }
        if (cloud.has_labels()) out << ' ' << cloud.labels[i];
        out << '\n';
    }
}

PointCloud read_off(std::istream& in, const std::string& name) {
    std::string line;
    std::size_t line_no = 0;
    auto next_content = [&]() -> std::string {
        while (std::getline(in, line)) {
            ++line_no;
            if (!blank_or_comment(line)) return line;
        }
        throw ParseError(name, line_no, "unexpected end of file");
    };
    std::string header = next_content();
    std::size_t nv = 0;
    {
        std::istringstream hs(header);
        std::string magic;
        hs >> magic;
        if (magic != "OFF") throw ParseError(name, line_no, "missing OFF header");
        std::size_t nf = 0, ne = 0;
        if (!(hs >> nv)) {
            // Counts on the following line.
            std::istringstream cs(next_content());
            if (!(cs >> nv >> nf >> ne)) throw ParseError(name, line_no, "bad count line");
        } else {
            hs >> nf >> ne;
        }
    }
    PointCloud cloud;
    cloud.points.reserve(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        std::istringstream vs(next_content());
        std::string sx, sy, sz;
        if (!(vs >> sx >> sy >> sz)) throw ParseError(name, line_no, "bad vertex line");
        cloud.points.push_back({parse_coord(sx, name, line_no), parse_coord(sy, name, line_no),
                                parse_coord(sz, name, line_no)});
    }
    cloud.validate();
    return cloud;
}

PointCloud read_ply(std::istream& in, const std::string& name) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line) || line.substr(0, 3) != "ply")
        throw ParseError(name, 1, "missing ply header");
    ++line_no;
    std::size_t nv = 0;
    std::vector<std::string> vertex_props;
    std::string current_element;
    bool ascii = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "format") {
            std::string fmt;
            ls >> fmt;
            ascii = (fmt == "ascii");
        } else if (kw == "element") {
            std::string ename;
            std::size_t cnt = 0;
            ls >> ename >> cnt;
            current_element = ename;
            if (ename == "vertex") nv = cnt;
        } else if (kw == "property" && current_element == "vertex") {
            std::string type, pname;
            ls >> type;
            if (type == "list") {
                std::string t2, t3;
                ls >> t2 >> t3 >> pname;
            } else {
                ls >> pname;
            }
            vertex_props.push_back(pname);
        } else if (kw == "end_header") {
            break;
        }
    }
    if (!ascii) throw ParseError(name, line_no, "only ascii PLY is supported");
    if (nv == 0) throw ParseError(name, line_no, "no vertex element");
    int ix = -1, iy = -1, iz = -1, inx = -1, iny = -1, inz = -1;
    for (std::size_t i = 0; i < vertex_props.size(); ++i) {
        const std::string& p = vertex_props[i];
        if (p == "x") ix = static_cast<int>(i);
        if (p == "y") iy = static_cast<int>(i);
        if (p == "z") iz = static_cast<int>(i);
        if (p == "nx") inx = static_cast<int>(i);
        if (p == "ny") iny = static_cast<int>(i);
        if (p == "nz") inz = static_cast<int>(i);
    }
    if (ix < 0 || iy < 0 || iz < 0) throw ParseError(name, line_no, "vertex element lacks x/y/z");
    PointCloud cloud;
    cloud.points.reserve(nv);
    const bool with_normals = inx >= 0 && iny >= 0 && inz >= 0;
    for (std::size_t v = 0; v < nv; ++v) {
        if (!std::getline(in, line)) throw ParseError(name, line_no, "unexpected end of file");
        ++line_no;
        std::istringstream vs(line);
        std::vector<std::string> toks;
        std::string tok;
        while (vs >> tok) toks.push_back(tok);
        if (toks.size() < vertex_props.size())
            throw ParseError(name, line_no, "short vertex line");
        cloud.points.push_back({parse_coord(toks[static_cast<std::size_t>(ix)], name, line_no),
                                parse_coord(toks[static_cast<std::size_t>(iy)], name, line_no),
                                parse_coord(toks[static_cast<std::size_t>(iz)], name, line_no)});
        if (with_normals)
            cloud.normals.push_back(
                {parse_coord(toks[static_cast<std::size_t>(inx)], name, line_no),
                 parse_coord(toks[static_cast<std::size_t>(iny)], name, line_no),
                 parse_coord(toks[static_cast<std::size_t>(inz)], name, line_no)});
    }
    cloud.validate();
    return cloud;
}

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return in;
}

} // namespace

PointCloud read_xyz_file(const std::string& path) {
    auto in = open_input(path);
    return read_xyz(in, path);
}

PointCloud read_off_file(const std::string& path) {
    auto in = open_input(path);
    return read_off(in, path);
}

PointCloud read_ply_file(const std::string& path) {
    auto in = open_input(path);
    return read_ply(in, path);
}

void write_xyz_file(const std::string& path, const PointCloud& cloud) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    write_xyz(out, cloud);
}

PointCloud read_point_cloud(const std::string& path) {
    auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == "xyz" || ext == "txt") return read_xyz_file(path);
    if (ext == "off") return read_off_file(path);
    if (ext == "ply") return read_ply_file(path);
    throw ConfigError("unknown point-cloud extension '" + ext + "' for " + path);
}

} // namespace poirot
