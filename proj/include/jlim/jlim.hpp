#pragma once

#include <jlim/errors.hpp>
#include <jlim/rational.hpp>
#include <jlim/gaussian.hpp>
#include <jlim/polar.hpp>
#include <jlim/binomial.hpp>
#include <jlim/exact_complex.hpp>
#include <jlim/floatc.hpp>
#include <jlim/exact_vector.hpp>
#include <jlim/similarity.hpp>
#include <jlim/jordan.hpp>
#include <jlim/limitset.hpp>
#include <jlim/witness.hpp>
#include <jlim/oracle.hpp>
#include <jlim/selftest.hpp>
