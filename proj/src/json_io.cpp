#include "tkit/json_io.hpp"

#include <fstream>

#include "tkit/errors.hpp"

namespace tkit {

Json to_json(const PolyMap& p) {
    Json terms = Json::array();
    for (const auto& [idx, c] : p.coeffs()) {
        Json zexp = Json::array(), zbexp = Json::array(), coeff = Json::array();
        for (int i = 0; i < p.n(); ++i) {
            zexp.push_back(idx.zexp(i));
            zbexp.push_back(idx.zbarexp(i));
        }
        for (int j = 0; j < p.m(); ++j)
            coeff.push_back({c[j].real(), c[j].imag()});
        terms.push_back({{"zexp", zexp}, {"zbarexp", zbexp}, {"coeff", coeff}});
    }
    return Json{{"n", p.n()}, {"m", p.m()}, {"terms", terms}};
}

PolyMap polymap_from_json(const Json& j) {
    try {
        int n = j.at("n").get<int>();
        int m = j.at("m").get<int>();
        if (n <= 0 || m <= 0) throw SchemaError("polymap dims must be positive");
        PolyMap p(n, m);
        for (const auto& t : j.at("terms")) {
            const auto& ze = t.at("zexp");
            const auto& zbe = t.at("zbarexp");
            const auto& co = t.at("coeff");
            if (static_cast<int>(ze.size()) != n || static_cast<int>(zbe.size()) != n)
                throw SchemaError("term exponent arity mismatch");
            if (static_cast<int>(co.size()) != m)
                throw SchemaError("term coefficient arity mismatch");
            MultiIndex idx(n);
            for (int i = 0; i < n; ++i) {
                idx.zexp(i) = ze[i].get<int>();
                idx.zbarexp(i) = zbe[i].get<int>();
                if (idx.zexp(i) < 0 || idx.zbarexp(i) < 0)
                    throw SchemaError("negative exponent");
            }
            CVec c(m);
            for (int k = 0; k < m; ++k)
                c[k] = Complex(co[k][0].get<double>(), co[k][1].get<double>());
            p.add_term(idx, c);
        }
        p.normalize();
        return p;
    } catch (const Json::exception& e) {
        throw SchemaError(std::string("polymap schema: ") + e.what());
    }
}

Json to_json(const CVec& v) {
    Json out = Json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
    return out;
}

CVec cvec_from_json(const Json& j) {
    try {
        CVec v(j.size());
        for (std::size_t i = 0; i < j.size(); ++i)
            v[i] = Complex(j[i][0].get<double>(), j[i][1].get<double>());
        return v;
    } catch (const Json::exception& e) {
        throw SchemaError(std::string("complex vector schema: ") + e.what());
    }
}

Json to_json(const TransversalityCertificate& cert) {
    return Json{{"ball_center", to_json(cert.ball.center)},
                {"ball_radius", cert.ball.radius},
                {"grid_spacing", cert.grid_spacing},
                {"margin", cert.margin},
                {"lipschitz_slack", cert.lipschitz_slack},
                {"holomorphic_only", cert.holomorphic_only},
                {"dbar_penalty", cert.dbar_penalty},
                {"margin_clamped", cert.margin_clamped}};
}

TransversalityCertificate certificate_from_json(const Json& j) {
    try {
        TransversalityCertificate cert;
        cert.ball.center = cvec_from_json(j.at("ball_center"));
        cert.ball.radius = j.at("ball_radius").get<double>();
        cert.grid_spacing = j.at("grid_spacing").get<double>();
        cert.margin = j.at("margin").get<double>();
        cert.lipschitz_slack = j.at("lipschitz_slack").get<double>();
        cert.holomorphic_only = j.at("holomorphic_only").get<bool>();
        cert.dbar_penalty = j.at("dbar_penalty").get<double>();
        cert.margin_clamped = j.at("margin_clamped").get<bool>();
        return cert;
    } catch (const Json::exception& e) {
        throw SchemaError(std::string("certificate schema: ") + e.what());
    }
}

Json to_json(const PerturbationResult& res) {
    return Json{{"w", to_json(res.w)},
                {"delta", res.delta},
                {"achieved_margin", res.achieved_margin},
                {"certificate", to_json(res.certificate)},
                {"attempts", res.attempts},
                {"alpha", res.alpha},
                {"eta", res.eta},
                {"aux_scale", res.aux_scale},
                {"chain_ok", res.chain_ok}};
}

Json to_json(const CoveringBudget& b) {
    return Json{{"N", b.N},
                {"d", b.d},
                {"D", b.D},
                {"delta", b.delta},
                {"eta", b.eta},
                {"C", b.C},
                {"c_approx", b.c_approx},
                {"M", b.M},
                {"Z_volume_fraction", b.Z_volume_fraction},
                {"feasible", b.feasible}};
}

Json to_json(const FamilyResult& res) {
    Json steps = Json::array();
    for (const auto& s : res.steps) steps.push_back(to_json(s));
    return Json{{"steps", steps},
                {"segment_margin_lb", res.segment_margin_lb},
                {"max_jump", res.max_jump},
                {"eta", res.eta},
                {"ok", res.ok},
                {"first_failing_segment", res.first_failing_segment}};
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path);
    try {
        Json j;
        in >> j;
        return j;
    } catch (const Json::exception& e) {
        throw SchemaError(std::string("json parse: ") + e.what());
    }
}

void save_json(const Json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace tkit
