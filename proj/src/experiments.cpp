#include "sl2limits/experiments.hpp"

#include <algorithm>
#include <set>

#include "sl2limits/chabauty.hpp"
#include "sl2limits/orbit.hpp"
#include "sl2limits/polar.hpp"
#include "sl2limits/real_limits.hpp"

namespace sl2limits {

using nlohmann::json;

namespace {

constexpr long kBig = 1L << 40;

struct ReportBuilder {
    json j;
    bool all = true;
    ReportBuilder(const std::string& name, const std::string& claim,
                  const ExperimentConfig& cfg) {
        j["experiment"] = name;
        j["claim"] = claim;
        j["config"] = cfg.echo();
        j["items"] = json::array();
        j["verdicts"] = json::array();
    }
    void item(json it) { j["items"].push_back(std::move(it)); }
    void verdict(const std::string& name, bool pass, json detail = json::object()) {
        j["verdicts"].push_back({{"name", name}, {"pass", pass}, {"detail", std::move(detail)}});
        all = all && pass;
    }
    json finish() {
        j["pass"] = all;
        return j;
    }
};

long digits(const TowerContextPtr& t, Level lvl, long quarters) {
    if (quarters > kBig) return kBig;
    return quarters * t->ram_index(lvl) / 4;
}

PadicScalar class_rep_scalar(const PrimeContextPtr& prime, int idx) {
    switch (idx) {
        case 0: return PadicScalar::one(prime);
        case 1: return PadicScalar::integer(prime, prime->nonsquare());
        case 2: return PadicScalar::uniformizer(prime);
        default: return PadicScalar::integer(prime, prime->nonsquare()).shift(1);
    }
}

const char* class_rep_name(int idx) {
    switch (idx) {
        case 0: return "1";
        case 1: return "S";
        case 2: return "w";
        default: return "Sw";
    }
}

}  // namespace

TowerContextPtr ExperimentConfig::tower() const {
    return TowerContext::make(PrimeContext::make(p, precision),
                              ExtensionDescriptor::make(ext));
}

json ExperimentConfig::echo() const {
    return json{{"p", p},
                {"ext", ExtensionDescriptor::make(ext).name()},
                {"precision", precision},
                {"seed", seed},
                {"samples", samples},
                {"n_min", n_min},
                {"n_max", n_max},
                {"rounds", rounds},
                {"cap", cap},
                {"ball_radius", ball_radius},
                {"bfs_radius", bfs_radius},
                {"dot_radius", dot_radius},
                {"sl2_sample_spread", 1}};
}

ExtensionKind parse_extension(const std::string& name) {
    if (name == "unram") return ExtensionKind::Unramified;
    if (name == "ram-p") return ExtensionKind::RamifiedP;
    if (name == "ram-ps") return ExtensionKind::RamifiedPS;
    throw ConfigError("unknown extension kind: " + name);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    if (j.contains("p")) c.p = j.at("p").get<long>();
    if (j.contains("ext")) c.ext = parse_extension(j.at("ext").get<std::string>());
    if (j.contains("precision")) c.precision = j.at("precision").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("samples")) c.samples = j.at("samples").get<int>();
    if (j.contains("n_min")) c.n_min = j.at("n_min").get<long>();
    if (j.contains("n_max")) c.n_max = j.at("n_max").get<long>();
    if (j.contains("rounds")) c.rounds = j.at("rounds").get<int>();
    if (j.contains("cap")) c.cap = j.at("cap").get<int>();
    if (j.contains("ball_radius")) c.ball_radius = j.at("ball_radius").get<long>();
    if (j.contains("bfs_radius")) c.bfs_radius = j.at("bfs_radius").get<int>();
    if (j.contains("dot_radius")) c.dot_radius = j.at("dot_radius").get<int>();
    return c;
}

json run_classify(const ExperimentConfig& cfg, const json& params) {
    auto t = cfg.tower();
    auto prime = t->prime();
    Rng rng(cfg.seed);
    ReportBuilder rep("classify",
                      "involutions of SL(2,E) split into the sigma-twisted families "
                      "[[z,y],[1,-sigma z]], [[x,0],[0,1]] and the inner family "
                      "[[0,1],[a,0]]; certified conjugators normalize each",
                      cfg);
    const long tol = 4 * (prime->precision() - 4);

    auto classify_one = [&](const Involution& th, json& it) {
        it["q"] = th.q().str();
        th.verify(rng);
        if (th.gamma() == Gamma::Sigma) {
            ConjugatorOptions opts;
            if (params.contains("c2"))
                opts.c2 = PadicScalar::integer(prime, params.at("c2").get<long>());
            auto cert = conjugator_to_sigma(th, opts);
            it["case"] = case_name(cert.tag);
            it["certificate_level"] = cert.level == Level::K ? "biquadratic" : "quadratic";
            it["residual_digits"] = digits(cert.tower(), cert.level, cert.residual_q);
            it["scalar_c"] = cert.c.str();
            rep.verdict(std::string("residual-") + case_name(cert.tag),
                        cert.residual_q >= tol && cert.B.is_invertible());
        } else {
            auto cert = conjugator_to_diagonal(prime, th.param_a());
            auto fe = fixed_ends(prime, th.param_a());
            it["case"] = "diag";
            it["fixed_ends_rational"] = fe.rational;
            it["certificate_level"] = fe.rational ? "base" : "quadratic";
            it["residual_digits"] = digits(fe.tower, fe.level, cert.residual_q);
            rep.verdict("residual-diag-a-" + th.param_a().str(), cert.residual_q >= tol);
        }
    };

    if (params.contains("family")) {
        std::string fam = params.at("family").get<std::string>();
        json it{{"family", fam}};
        if (fam == "weyl") {
            auto th = Involution::family_weyl(t, Level::QP,
                                              PadicScalar::integer(prime, params.at("a").get<long>()));
            classify_one(th, it);
        } else if (fam == "diag") {
            ExtScalar x = ExtScalar::make_e(t, PadicScalar::integer(prime, params.value("x1", 1L)),
                                            PadicScalar::integer(prime, params.value("x2", 0L)));
            classify_one(Involution::family_diag(t, x), it);
        } else {
            ExtScalar z = ExtScalar::make_e(t, PadicScalar::integer(prime, params.value("z1", 0L)),
                                            PadicScalar::integer(prime, params.value("z2", 0L)));
            classify_one(Involution::family_zy(t, z, PadicScalar::integer(prime, params.value("y", 1L))),
                         it);
        }
        rep.item(it);
        return rep.finish();
    }

    // Default sweep: the four inner classes plus sigma-family exemplars.
    for (int i = 0; i < 4; ++i) {
        json it{{"family", "weyl"}, {"a", class_rep_name(i)}};
        classify_one(Involution::family_weyl(t, Level::QP, class_rep_scalar(prime, i)), it);
        rep.item(it);
    }
    {
        json it{{"family", "diag"}};
        ExtScalar w = rng.ext(t, Level::E, 0, 1);
        classify_one(Involution::family_diag(t, w / w.sigma()), it);
        rep.item(it);
    }
    for (long z2 : {0L, 1L}) {
        json it{{"family", "zy"}};
        ExtScalar z = ExtScalar::make_e(t, PadicScalar::integer(prime, 1),
                                        PadicScalar::integer(prime, z2));
        auto q = z * z.sigma() + ExtScalar::integer(t, Level::E, 2);
        if (q.is_zero_like()) continue;
        classify_one(Involution::family_zy(t, z, PadicScalar::integer(prime, 2)), it);
        rep.item(it);
    }
    return rep.finish();
}

json run_fixed_group(const ExperimentConfig& cfg) {
    auto t = cfg.tower();
    auto prime = t->prime();
    Rng rng(cfg.seed);
    ReportBuilder rep("fixed-group",
                      "fixed groups of the inner involutions are the norm-one shapes "
                      "[[x,y],[ay,x]]; sigma-type fixed groups are conjugates of the "
                      "rational subgroup detected through the certificate",
                      cfg);
    int per_class = std::max(cfg.samples / 4, 8);

    for (int i = 0; i < 4; ++i) {
        PadicScalar a = class_rep_scalar(prime, i);
        auto th = Involution::family_weyl(t, Level::QP, a);
        auto sample = h_theta_a_sample(t, Level::QP, a, per_class, rng);
        size_t fixed = 0, closed = 0;
        long worst = kBig;
        for (size_t k = 0; k < sample.size(); ++k) {
            auto r = fixed_point_test(th, sample[k]);
            if (r.fixed) ++fixed;
            worst = std::min(worst, r.defect_q);
            const Mat2& other = sample[(k + 1) % sample.size()];
            if (fixed_point_test(th, sample[k] * other).fixed &&
                fixed_point_test(th, sample[k].inverse()).fixed)
                ++closed;
        }
        rep.item(json{{"a", class_rep_name(i)},
                      {"samples", sample.size()},
                      {"fixed", fixed},
                      {"closed", closed},
                      {"min_defect_digits", digits(t, Level::QP, worst)}});
        rep.verdict(std::string("shape-fixed-a-") + class_rep_name(i),
                    fixed == sample.size() && closed == sample.size());
    }

    // Sigma-type membership through a certificate (x = -1 exemplar).  The
    // rational unipotent is NOT in the alpha-conjugated copy; the alpha
    // unipotent IS (theta flips the sign of sigma(alpha) back).
    auto th = Involution::family_diag(t, -ExtScalar::one(t, Level::E));
    auto cert = conjugator_to_sigma(th);
    Mat2 w(ExtScalar::one(t, Level::E), ExtScalar::one(t, Level::E),
           ExtScalar::zero(t, Level::E), ExtScalar::one(t, Level::E));
    Mat2 ua(ExtScalar::one(t, Level::E), ExtScalar::alpha(t), ExtScalar::zero(t, Level::E),
            ExtScalar::one(t, Level::E));
    int members = 0, strangers = 0, member_count = per_class;
    for (int k = 0; k < member_count; ++k) {
        Mat2 h = random_sl2(t, Level::QP, rng).retower(t, Level::E);
        Mat2 g = cert.B * h * cert.B.inverse();
        if (h_theta_sigma_membership(cert, g) && fixed_point_test(th, g).fixed &&
            h_theta_sigma_membership(cert, g * ua))
            ++members;
        if (!h_theta_sigma_membership(cert, w * g) && !fixed_point_test(th, w * g).fixed)
            ++strangers;
    }
    rep.item(json{{"sigma_case", case_name(cert.tag)},
                  {"members_confirmed", members},
                  {"strangers_rejected", strangers}});
    rep.verdict("sigma-membership", members == member_count && strangers == member_count);

    // For theta = sigma itself the alpha unipotent is the canonical outsider.
    auto thsig = Involution::family_diag(t, ExtScalar::one(t, Level::E));
    auto certsig = conjugator_to_sigma(thsig);
    rep.verdict("sigma-itself-rejects-alpha-unipotent",
                !h_theta_sigma_membership(certsig, ua) &&
                    h_theta_sigma_membership(certsig, w));
    return rep.finish();
}

json run_orbits(const ExperimentConfig& cfg) {
    auto t = cfg.tower();
    auto prime = t->prime();
    Rng rng(cfg.seed);
    ReportBuilder rep("orbits",
                      "boundary orbit counts at desk scale: the diagonal subgroup sees "
                      "exactly 6 classes, the rational subgroup at most 5, the fixed "
                      "groups at most 8",
                      cfg);

    // Diagonal subgroup: square-progression seeds collapse to exactly 6.
    {
        std::vector<Mat2> gens;
        for (long d : {2, 3, 5, 10, 15}) {
            auto de = ExtScalar::integer(t, Level::QP, d);
            gens.push_back(Mat2::diag(de.inv(), de));
        }
        std::vector<End> seeds{End::infinity(t, Level::QP),
                               End::finite(ExtScalar::zero(t, Level::QP))};
        long s = prime->nonsquare();
        for (long base : {1L, s, cfg.p, s * cfg.p})
            for (long f : {1L, 4L, 16L})
                seeds.push_back(End::finite(ExtScalar::integer(t, Level::QP, base * f)));
        auto res = orbit_experiment(gens, seeds, cfg.rounds, static_cast<size_t>(cfg.cap));
        rep.item(json{{"group", "diagonal"},
                      {"ends", res.total_ends},
                      {"classes", res.class_count},
                      {"merges", res.merges}});
        rep.verdict("diagonal-exactly-6", res.class_count == 6);

        // Invariance of the diagonal label + witness transport.
        size_t ok = 0;
        size_t trials = 1000;
        for (size_t i = 0; i < trials; ++i) {
            auto d = rng.ext(t, Level::QP, -3, 3);
            Mat2 g = Mat2::diag(d.inv(), d);
            End e = End::finite(rng.ext(t, Level::QP, -3, 3));
            if (end_orbit_label_diag(act_end(g, e)) == end_orbit_label_diag(e)) ++ok;
        }
        rep.verdict("diagonal-label-invariance", ok == trials, json{{"trials", trials}});
    }

    // Rational subgroup on the extension boundary: at most 5 labels.
    {
        std::set<std::string> labels;
        size_t ok = 0, trials = 1000;
        for (size_t i = 0; i < trials; ++i) {
            End e = i == 0 ? End::infinity(t, Level::E)
                   : rng.flip() ? End::finite(rng.ext(t, Level::E, -2, 2))
                               : End::finite(ExtScalar::make_e(
                                     t, PadicScalar::integer(prime, rng.range(-20, 20)),
                                     PadicScalar::integer(prime, rng.range(1, 20))));
            OrbitLabel l = end_orbit_label_slF(e);
            labels.insert(l.name());
            auto d = rng.scalar(prime, -2, 2);
            auto c = rng.flip() ? rng.scalar(prime, 0, 2) : PadicScalar::zero(prime);
            Mat2 g(ExtScalar::from_padic(t, Level::E, d.inv()), ExtScalar::zero(t, Level::E),
                   ExtScalar::from_padic(t, Level::E, c), ExtScalar::from_padic(t, Level::E, d));
            if (end_orbit_label_slF(act_end(g, e)) == l) ++ok;
        }
        rep.item(json{{"group", "rational"}, {"labels", json(labels)}});
        rep.verdict("rational-at-most-5", labels.size() <= 5);
        rep.verdict("rational-label-invariance", ok == trials, json{{"trials", trials}});
    }

    // Fixed groups of the nontrivial classes: witness-certified merging.
    for (int i = 1; i < 4; ++i) {
        PadicScalar a = class_rep_scalar(prime, i);
        auto fe = fixed_ends(prime, a);
        auto gens = h_theta_a_sample(t, Level::QP, a, 14, rng);
        std::vector<End> seeds{End::infinity(t, Level::QP),
                               End::finite(ExtScalar::zero(t, Level::QP))};
        for (long m : {1, 2, 3, 4, 5, 7, 10, 11, 6, 8, 15, 20, 25, 50})
            seeds.push_back(End::finite(ExtScalar::integer(t, Level::QP, m)));
        for (int k = 0; k < 8; ++k)
            seeds.push_back(End::finite(ExtScalar::from_padic(t, Level::QP,
                                                              rng.scalar(prime, -2, 2))));
        MergeOracle oracle = [&](const End& x, const End& y) {
            return fixed_group_transitivity_witness(fe, x, y);
        };
        auto res = orbit_experiment(gens, seeds, cfg.rounds, static_cast<size_t>(cfg.cap),
                                    oracle);
        json ev = json::array();
        for (size_t k = 0; k < res.merge_events.size() && k < 5; ++k)
            ev.push_back(json{{"from", res.merge_events[k].first},
                              {"to", res.merge_events[k].second}});
        rep.item(json{{"group", std::string("fixed-a-") + class_rep_name(i)},
                      {"ends", res.total_ends},
                      {"classes", res.class_count},
                      {"merges", res.merges},
                      {"merge_events_head", ev},
                      {"skipped", res.skipped}});
        rep.verdict(std::string("fixed-group-at-most-8-a-") + class_rep_name(i),
                    res.class_count <= 8);
    }
    return rep.finish();
}

json run_polar(const ExperimentConfig& cfg) {
    auto t = cfg.tower();
    Rng rng(cfg.seed);
    ReportBuilder rep("polar",
                      "every group element factors as compact x hyperbolic-power x "
                      "symmetric-subgroup element, reconstructed entrywise",
                      cfg);
    const long tol = 4 * (t->prime()->precision() - 4);

    for (PolarPair pair : {PolarPair::RationalInsideExtension,
                           PolarPair::FixedGroupA1InsideRational}) {
        Level lvl = pair == PolarPair::RationalInsideExtension ? Level::E : Level::QP;
        long worst_defect = kBig, worst_disp = 0, max_n = 0;
        int fails = 0;
        for (int i = 0; i < cfg.samples; ++i) {
            Mat2 g = random_sl2(t, lvl, rng, 1);
            try {
                auto d = polar_decompose(g, pair);
                worst_defect = std::min(worst_defect, d.recon_defect_q);
                worst_disp = std::max(worst_disp, d.displacement);
                max_n = std::max(max_n, d.n >= 0 ? d.n : -d.n);
            } catch (const Error&) {
                ++fails;
            }
        }
        rep.item(json{{"pair", pair == PolarPair::RationalInsideExtension
                                   ? "rational-in-extension"
                                   : "fixed-group-in-rational"},
                      {"samples", cfg.samples},
                      {"failures", fails},
                      {"min_recon_digits", digits(t, lvl, worst_defect)},
                      {"max_displacement", worst_disp},
                      {"max_power", max_n}});
        rep.verdict(pair == PolarPair::RationalInsideExtension ? "roundtrip-extension"
                                                               : "roundtrip-fixed-group",
                    fails == 0 && worst_defect >= tol &&
                        worst_disp <= polar_displacement_bound(pair));
    }
    return rep.finish();
}

json run_limits_padic(const ExperimentConfig& cfg) {
    auto t = cfg.tower();
    auto prime = t->prime();
    Rng rng(cfg.seed);
    ReportBuilder rep("limits-padic",
                      "diagonal-power conjugates of the rotated rational subgroup "
                      "converge onto the lower-triangular norm-one group with rate 2 "
                      "digits per step; fixed-group conjugates converge onto the "
                      "second-roots-of-unity unipotent group",
                      cfg);

    long bunit = t->ext().e == 1 ? 1 : 0;
    std::vector<PadicScalar> bvals{PadicScalar::zero(prime),
                                   PadicScalar::one(prime).shift(bunit),
                                   PadicScalar::integer(prime, 2).shift(bunit)};
    std::vector<std::pair<int, int>> branches{{+1, +1}, {-1, +1}, {+1, -1}};
    std::vector<ExtScalar> cvals{ExtScalar::zero(t, Level::E), ExtScalar::one(t, Level::E),
                                 ExtScalar::alpha(t)};

    bool grid_ok = true;
    json grid = json::array();
    for (size_t ib = 0; ib < bvals.size(); ++ib)
        for (size_t is = 0; is < branches.size(); ++is)
            for (size_t ic = 0; ic < cvals.size(); ++ic) {
                PadicLimitTarget target{branches[is].first,
                                        branches[is].second >= 0 ? bvals[ib] : -bvals[ib],
                                        cvals[ic]};
                ConvergenceReport r = verify_convergence(t, target, cfg.n_min, cfg.n_max);
                bool constant = !r.records.empty();
                for (const auto& rec : r.records)
                    constant = constant && rec.target_defect >=
                                               (prime->precision() - 8);
                bool sl_all = true;
                for (const auto& rec : r.records) sl_all = sl_all && rec.sl_ok;
                bool ok = !r.records.empty() && r.monotone && sl_all &&
                          (constant || (r.slope > 1.8 && r.slope < 2.2));
                grid_ok = grid_ok && ok;
                json cell{{"b", ib},          {"branch", is},
                          {"c", ic},          {"slope", r.slope},
                          {"constant", constant}, {"threshold", r.hensel_threshold},
                          {"c_bound", r.shape_c_bound}, {"ok", ok}};
                if (ib == 1 && is == 0 && ic == 1) {
                    json recs = json::array();
                    for (const auto& rec : r.records)
                        recs.push_back(json{{"n", rec.n},
                                            {"shape_defect", rec.shape_defect},
                                            {"target_defect", rec.target_defect},
                                            {"sl_defect", rec.sl_defect},
                                            {"matrix", rec.matrix}});
                    cell["records"] = recs;
                }
                grid.push_back(cell);
            }
    rep.item(json{{"name", "target-grid"}, {"cells", grid}});
    rep.verdict("grid-slope-2", grid_ok);

    Condition2Report c2 = condition2_sweep(t, cfg.ball_radius, cfg.ball_radius,
                                           cfg.n_max + cfg.ball_radius, cfg.samples / 4, rng);
    rep.item(json{{"name", "kernel-sweep"},
                  {"samples", c2.samples},
                  {"c_fitted", c2.c_fitted},
                  {"worst_margin", c2.worst_margin}});
    rep.verdict("kernel-defects-above-2n-c",
                c2.all_above && c2.samples >= static_cast<size_t>(cfg.samples / 8) &&
                    c2.c_fitted <= 2 * cfg.ball_radius + 8);

    // mu_2 limits of the fixed groups, all four classes and both signs.
    bool mu_ok = true;
    json mu = json::array();
    for (int i = 0; i < 4; ++i)
        for (int sign : {+1, -1}) {
            MuTwoReport r = verify_htheta_limits(t, class_rep_scalar(prime, i),
                                                 PadicScalar::integer(prime, 3), sign,
                                                 cfg.n_min, std::max(cfg.n_max, 8L));
            bool ok = !r.records.empty() && r.diagonal_in_mu2 && r.slope_per_step > 1.8 &&
                      r.slope_per_step < 2.2;
            mu_ok = mu_ok && ok;
            mu.push_back(json{{"a", class_rep_name(i)},
                              {"sign", sign},
                              {"slope_per_step", r.slope_per_step},
                              {"ok", ok}});
        }
    rep.item(json{{"name", "mu2-limits"}, {"cells", mu}});
    rep.verdict("mu2-dichotomy-and-rate", mu_ok);
    return rep.finish();
}

json run_limits_real(const ExperimentConfig& cfg) {
    ReportBuilder rep("limits-real",
                      "exponential-diagonal conjugates of the rotated real subgroup "
                      "converge onto the conjugate-diagonal upper-triangular group at "
                      "rate e^-2n",
                      cfg);
    Rng rng(cfg.seed);
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(rng.u64() >> 11) / 9007199254740992.0;
    };
    bool ok_all = true;
    for (int i = 0; i < 10; ++i) {
        double phi = uniform(0.05, 6.2);
        RealTarget target{std::cos(phi), std::sin(phi),
                          cplx(uniform(-3, 3), uniform(-3, 3))};
        auto r = verify_real_convergence(target, 5, 15);
        bool ok = !r.degenerate && r.log_slope > -2.2 && r.log_slope < -1.8 &&
                  r.upper_err_max < 5e-3 && r.diag_conjugacy_err < 1e-9 && r.norm_err < 1e-9;
        bool det_ok = true;
        for (const auto& rec : r.records) det_ok = det_ok && rec.det_err < 1e-9;
        ok = ok && det_ok;
        ok_all = ok_all && ok;
        rep.item(json{{"a", target.a},
                      {"b", target.b},
                      {"slope", r.log_slope},
                      {"upper_err", r.upper_err_max},
                      {"ok", ok}});
    }
    rep.verdict("real-slope-minus-2", ok_all);

    auto trivial = verify_real_convergence(RealTarget{1.0, 0.0, cplx(0, 0)}, 1, 15);
    rep.verdict("trivial-target-at-epsilon", trivial.degenerate);
    return rep.finish();
}

json run_tree_dot(const ExperimentConfig& cfg) {
    auto t = cfg.tower();
    ReportBuilder rep("tree-dot", "ball of the extension tree with the embedded rational subtree",
                      cfg);
    std::string dot = tree_ball_dot(base_vertex(t, Level::E), cfg.dot_radius);
    rep.item(json{{"dot", dot}});
    rep.verdict("dot-nonempty", dot.find("graph") != std::string::npos);
    return rep.finish();
}

}  // namespace sl2limits
