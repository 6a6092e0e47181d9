#ifndef GROUPWIGNER_GROUPWIGNER_HPP
#define GROUPWIGNER_GROUPWIGNER_HPP

#include "core.hpp"
#include "circle.hpp"
#include "su2.hpp"
#include "finite.hpp"
#include "hilbert.hpp"
#include "wigner.hpp"
#include "star.hpp"
#include "semiquant.hpp"

#endif
