#pragma once

#include <Eigen/Core>

namespace brdel::geometry {

// Sign-exact orientation and in-circle tests. A floating-point filter with
// Shewchuk's static error bounds answers almost every call; the remainder is
// settled in exact rational arithmetic.
//
// orient2d > 0  iff  a, b, c are counter-clockwise.
// incircle > 0  iff  d lies inside the circle through ccw a, b, c.
int orient2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c);
int incircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
             const Eigen::Vector2d& d);

int orient2d_exact(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c);
int incircle_exact(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                   const Eigen::Vector2d& d);

// x first, then y
inline bool lex_less(const Eigen::Vector2d& p, const Eigen::Vector2d& q)
{
    return p.x() < q.x() || (p.x() == q.x() && p.y() < q.y());
}

} // namespace brdel::geometry
