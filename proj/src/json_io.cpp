#include "fbell/json_io.hpp"

#include <cstdio>

#include "fbell/errors.hpp"

namespace fbell {

namespace {

double number_at(const json& arr, std::size_t i, const std::string& where) {
    if (!arr.is_array() || i >= arr.size() || !arr[i].is_number())
        throw InputError(where, "expected a number at index " + std::to_string(i));
    return arr[i].get<double>();
}

const json& member(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw InputError(where, std::string("missing \"") + key + "\"");
    return j.at(key);
}

}  // namespace

json state_to_json(const TwoQubitState& state) {
    json re = json::array(), im = json::array();
    for (const auto& a : state.c) {
        re.push_back(a.real());
        im.push_back(a.imag());
    }
    return json{{"re", re}, {"im", im}};
}

TwoQubitState state_from_json(const json& j, const std::string& where) {
    const json& re = member(j, "re", where);
    const json& im = member(j, "im", where);
    if (!re.is_array() || re.size() != 4 || !im.is_array() || im.size() != 4)
        throw InputError(where, "\"re\" and \"im\" must be arrays of 4 numbers");
    TwoQubitState s;
    for (std::size_t i = 0; i < 4; ++i)
        s.c[i] = cplx(number_at(re, i, where + ".re"), number_at(im, i, where + ".im"));
    return s;
}

json density_to_json(const Matrix4c& rho) {
    json re = json::array(), im = json::array();
    for (int r = 0; r < 4; ++r) {
        json rr = json::array(), ri = json::array();
        for (int c = 0; c < 4; ++c) {
            rr.push_back(rho(r, c).real());
            ri.push_back(rho(r, c).imag());
        }
        re.push_back(rr);
        im.push_back(ri);
    }
    return json{{"re", re}, {"im", im}};
}

json density_to_json(const DensityMatrix& rho) { return density_to_json(rho.elements()); }

DensityMatrix density_from_json(const json& j, const std::string& where) {
    const json& re = member(j, "re", where);
    const json& im = member(j, "im", where);
    if (!re.is_array() || re.size() != 4 || !im.is_array() || im.size() != 4)
        throw InputError(where, "\"re\" and \"im\" must be 4x4 arrays");
    Matrix4c rho;
    for (int r = 0; r < 4; ++r) {
        const std::string row = "[" + std::to_string(r) + "]";
        if (!re[r].is_array() || re[r].size() != 4 || !im[r].is_array() || im[r].size() != 4)
            throw InputError(where + row, "row must have 4 entries");
        for (int c = 0; c < 4; ++c)
            rho(r, c) = cplx(number_at(re[r], c, where + ".re" + row), number_at(im[r], c, where + ".im" + row));
    }
    return DensityMatrix(rho);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace fbell
