#pragma once

#include "mbloch/core.hpp"
#include "mbloch/elliptic.hpp"
#include "mbloch/equilibria.hpp"
#include "mbloch/error.hpp"
#include "mbloch/fibers.hpp"
#include "mbloch/integrate.hpp"
#include "mbloch/io.hpp"
#include "mbloch/periodic.hpp"
#include "mbloch/strata.hpp"
#include "mbloch/symplectic.hpp"
#include "mbloch/verify.hpp"
