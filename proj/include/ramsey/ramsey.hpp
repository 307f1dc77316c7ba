#pragma once

#include <ramsey/amalgam.hpp>
#include <ramsey/arrow.hpp>
#include <ramsey/budget.hpp>
#include <ramsey/canonical.hpp>
#include <ramsey/catalog.hpp>
#include <ramsey/certificate.hpp>
#include <ramsey/classes.hpp>
#include <ramsey/closure.hpp>
#include <ramsey/eppa.hpp>
#include <ramsey/hales_jewett.hpp>
#include <ramsey/irreducible.hpp>
#include <ramsey/morphism.hpp>
#include <ramsey/orderings.hpp>
#include <ramsey/parallel.hpp>
#include <ramsey/partite.hpp>
#include <ramsey/structure.hpp>
#include <ramsey/text_format.hpp>
