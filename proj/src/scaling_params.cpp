#include "scldpc/scaling_params.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace scldpc {

namespace {
constexpr const char* kMagic = "scldpc-scaling-v1";
}

ScalingRow ScalingParams::interpolate(double epsilon) const {
    if (rows.empty()) throw std::domain_error("scaling table has no rows");
    if (epsilon < rows.front().epsilon || epsilon > rows.back().epsilon) {
        std::ostringstream msg;
        msg << "epsilon " << epsilon << " outside estimated grid ["
            << rows.front().epsilon << ", " << rows.back().epsilon
            << "]; extrapolation refused";
        throw std::domain_error(msg.str());
    }
    size_t hi = 0;
    while (rows[hi].epsilon < epsilon) ++hi;
    if (rows[hi].epsilon == epsilon) return rows[hi];
    const ScalingRow& a = rows[hi - 1];
    const ScalingRow& b = rows[hi];
    const double w = (epsilon - a.epsilon) / (b.epsilon - a.epsilon);
    auto lerp = [w](double x, double y) { return x + w * (y - x); };
    ScalingRow r;
    r.epsilon = epsilon;
    r.alpha_term = lerp(a.alpha_term, b.alpha_term);
    r.beta_term = lerp(a.beta_term, b.beta_term);
    r.gamma_term = lerp(a.gamma_term, b.gamma_term);
    r.alpha_trunc = lerp(a.alpha_trunc, b.alpha_trunc);
    r.beta_trunc = lerp(a.beta_trunc, b.beta_trunc);
    r.gamma_trunc = lerp(a.gamma_trunc, b.gamma_trunc);
    r.speed = lerp(a.speed, b.speed);
    return r;
}

void ScalingParams::validate() const {
    if (!(eps_star > 0.0 && eps_star < 1.0))
        throw std::invalid_argument("eps_star must lie in (0, 1)");
    if (!(nu > 0.0) || !(theta > 0.0))
        throw std::invalid_argument("nu and theta must be positive");
    for (size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && !(rows[i].epsilon > rows[i - 1].epsilon))
            throw std::invalid_argument("table epsilons must be strictly increasing");
        if (!(rows[i].alpha_term < rows[i].beta_term) ||
            !(rows[i].alpha_trunc < rows[i].beta_trunc))
            throw std::invalid_argument("alpha must be below beta in every row");
    }
}

void write_scaling_params(std::ostream& os, const ScalingParams& p) {
    os << std::setprecision(17);
    os << kMagic << " dv=" << p.dv << " dc=" << p.dc << " L=" << p.L
       << " N_est=" << p.N_est << " trials=" << p.trials
       << " columns=epsilon,alpha_term,beta_term,gamma_term,alpha_trunc,"
          "beta_trunc,gamma_trunc,speed\n";
    for (const auto& r : p.rows)
        os << r.epsilon << ' ' << r.alpha_term << ' ' << r.beta_term << ' '
           << r.gamma_term << ' ' << r.alpha_trunc << ' ' << r.beta_trunc
           << ' ' << r.gamma_trunc << ' ' << r.speed << '\n';
    os << "eps_star " << p.eps_star << '\n';
    os << "nu " << p.nu << '\n';
    os << "theta " << p.theta << '\n';
    os << "nu_theta_epsilon " << p.nu_theta_epsilon << '\n';
    os << "gamma_hat " << p.gamma_hat << '\n';
    os << "nu_hat " << p.nu_hat << '\n';
    os << "theta_hat " << p.theta_hat << '\n';
    os << "theta_hat_source " << p.theta_hat_source << '\n';
    os << "alpha_lb_frac " << p.alpha_lb_frac << '\n';
}

ScalingParams read_scaling_params(std::istream& is) {
    ScalingParams p;
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("scaling table: empty file");
    {
        std::istringstream hs(line);
        std::string magic;
        hs >> magic;
        if (magic != kMagic)
            throw std::runtime_error("scaling table: unknown format " + magic);
        std::string tok;
        while (hs >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = tok.substr(0, eq);
            const std::string val = tok.substr(eq + 1);
            if (key == "dv") p.dv = std::stoi(val);
            else if (key == "dc") p.dc = std::stoi(val);
            else if (key == "L") p.L = std::stoi(val);
            else if (key == "N_est") p.N_est = std::stoi(val);
            else if (key == "trials") p.trials = std::stoi(val);
        }
    }
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        ScalingRow r;
        if (ls >> r.epsilon >> r.alpha_term >> r.beta_term >> r.gamma_term >>
            r.alpha_trunc >> r.beta_trunc >> r.gamma_trunc >> r.speed) {
            p.rows.push_back(r);
            continue;
        }
        std::istringstream kv(line);
        std::string key;
        kv >> key;
        if (key == "eps_star") kv >> p.eps_star;
        else if (key == "nu") kv >> p.nu;
        else if (key == "theta") kv >> p.theta;
        else if (key == "nu_theta_epsilon") kv >> p.nu_theta_epsilon;
        else if (key == "gamma_hat") kv >> p.gamma_hat;
        else if (key == "nu_hat") kv >> p.nu_hat;
        else if (key == "theta_hat") kv >> p.theta_hat;
        else if (key == "theta_hat_source") kv >> p.theta_hat_source;
        else if (key == "alpha_lb_frac") kv >> p.alpha_lb_frac;
        else throw std::runtime_error("scaling table: unknown key " + key);
    }
    p.validate();
    return p;
}

ScalingParams load_scaling_params(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open scaling table: " + path);
    return read_scaling_params(f);
}

void save_scaling_params(const std::string& path, const ScalingParams& p) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write scaling table: " + path);
    write_scaling_params(f, p);
}

}  // namespace scldpc
