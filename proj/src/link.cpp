#include "rl/link.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rl/json_out.hpp"

namespace rl {

void Link::validate() const {
    if (components.empty()) throw std::invalid_argument("link: needs at least one component");
    for (std::size_t i = 0; i < components.size(); ++i)
        if (!components[i]->closed())
            throw std::invalid_argument("link: component " + std::to_string(i) + " is not closed");
}

Link make_link(std::vector<PiecewiseCurve> curves, std::string name) {
    Link l;
    l.name = std::move(name);
    for (auto& c : curves) l.components.push_back(std::make_shared<PiecewiseCurve>(std::move(c)));
    l.validate();
    return l;
}

namespace {

void write_vec(JsonWriter& w, const char* key, const Vec3& v) {
    w.key(key).begin_array().value(v.x).value(v.y).value(v.z).end_array();
}

Vec3 read_vec(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument("link json: expected [x,y,z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::string link_to_json(const Link& link) {
    JsonWriter w;
    w.begin_object();
    if (!link.name.empty()) w.kv("name", link.name);
    w.key("components").begin_array();
    for (auto& comp : link.components) {
        auto* pw = dynamic_cast<const PiecewiseCurve*>(comp.get());
        if (!pw)
            throw std::invalid_argument("link json: only piecewise curves are serializable");
        w.begin_object().key("pieces").begin_array();
        for (const Piece& p : pw->pieces()) {
            w.begin_object();
            switch (p.type()) {
                case PieceType::Arc: {
                    auto& a = p.arc_data();
                    w.kv("type", "arc");
                    write_vec(w, "center", a.center);
                    write_vec(w, "u", a.u);
                    write_vec(w, "v", a.v);
                    w.kv("radius", a.radius).kv("theta0", a.theta0).kv("dtheta", a.dtheta);
                    break;
                }
                case PieceType::Segment: {
                    auto& s = p.segment_data();
                    w.kv("type", "segment");
                    write_vec(w, "a", s.a);
                    write_vec(w, "b", s.b);
                    break;
                }
                case PieceType::TorusSection: {
                    auto& t = p.torus_data();
                    w.kv("type", "torus_section");
                    w.kv("d", t.d).kv("z0", t.z0).kv("z1", t.z1).kv("branch", t.branch);
                    break;
                }
            }
            w.end_object();
        }
        w.end_array().end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

Link link_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Link link;
    if (j.contains("name")) link.name = j["name"].get<std::string>();
    if (!j.contains("components")) throw std::invalid_argument("link json: missing components");
    for (auto& jc : j["components"]) {
        std::vector<Piece> pieces;
        for (auto& jp : jc["pieces"]) {
            std::string type = jp["type"].get<std::string>();
            if (type == "arc") {
                ArcPiece a;
                a.center = read_vec(jp["center"]);
                a.u = read_vec(jp["u"]);
                a.v = read_vec(jp["v"]);
                a.radius = jp["radius"].get<double>();
                a.theta0 = jp["theta0"].get<double>();
                a.dtheta = jp["dtheta"].get<double>();
                pieces.push_back(Piece::arc(a));
            } else if (type == "segment") {
                SegmentPiece s;
                s.a = read_vec(jp["a"]);
                s.b = read_vec(jp["b"]);
                pieces.push_back(Piece::segment(s));
            } else if (type == "torus_section") {
                TorusSectionPiece t;
                t.d = jp["d"].get<double>();
                t.z0 = jp["z0"].get<double>();
                t.z1 = jp["z1"].get<double>();
                t.branch = jp["branch"].get<int>();
                pieces.push_back(Piece::torus_section(t));
            } else {
                throw std::invalid_argument("link json: unknown piece type " + type);
            }
        }
        link.components.push_back(std::make_shared<PiecewiseCurve>(std::move(pieces), true));
    }
    link.validate();
    return link;
}

Link load_link_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return link_from_json(ss.str());
}

void save_link_file(const Link& link, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << link_to_json(link) << "\n";
}

}  // namespace rl
