#include "brdel/predicates.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>

namespace brdel::geometry {

namespace {

using boost::multiprecision::cpp_rational;

constexpr double kEps = std::numeric_limits<double>::epsilon() / 2; // 2^-53
constexpr double kCcwBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIccBound = (10.0 + 96.0 * kEps) * kEps;

int sign_of(const cpp_rational& v) { return v.sign(); }

} // namespace

int orient2d_exact(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c)
{
    const cpp_rational acx = cpp_rational(a.x()) - cpp_rational(c.x());
    const cpp_rational bcx = cpp_rational(b.x()) - cpp_rational(c.x());
    const cpp_rational acy = cpp_rational(a.y()) - cpp_rational(c.y());
    const cpp_rational bcy = cpp_rational(b.y()) - cpp_rational(c.y());
    return sign_of(acx * bcy - acy * bcx);
}

int orient2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c)
{
    const double detleft = (a.x() - c.x()) * (b.y() - c.y());
    const double detright = (a.y() - c.y()) * (b.x() - c.x());
    const double det = detleft - detright;
    const double bound = kCcwBound * (std::abs(detleft) + std::abs(detright));
    if (det > bound)
        return 1;
    if (-det > bound)
        return -1;
    return orient2d_exact(a, b, c);
}

int incircle_exact(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                   const Eigen::Vector2d& d)
{
    const cpp_rational dx(d.x()), dy(d.y());
    const cpp_rational adx = cpp_rational(a.x()) - dx, ady = cpp_rational(a.y()) - dy;
    const cpp_rational bdx = cpp_rational(b.x()) - dx, bdy = cpp_rational(b.y()) - dy;
    const cpp_rational cdx = cpp_rational(c.x()) - dx, cdy = cpp_rational(c.y()) - dy;
    const cpp_rational alift = adx * adx + ady * ady;
    const cpp_rational blift = bdx * bdx + bdy * bdy;
    const cpp_rational clift = cdx * cdx + cdy * cdy;
    const cpp_rational det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy)
                             + clift * (adx * bdy - bdx * ady);
    return sign_of(det);
}

int incircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
             const Eigen::Vector2d& d)
{
    const double adx = a.x() - d.x(), ady = a.y() - d.y();
    const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
    const double cdx = c.x() - d.x(), cdy = c.y() - d.y();

    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;

    const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift
                             + (std::abs(cdxady) + std::abs(adxcdy)) * blift
                             + (std::abs(adxbdy) + std::abs(bdxady)) * clift;
    const double bound = kIccBound * permanent;
    if (det > bound)
        return 1;
    if (-det > bound)
        return -1;
    return incircle_exact(a, b, c, d);
}

} // namespace brdel::geometry
