"""Finite limits, colimits, exponentials and slices of presheaves."""
from .limits import (Colimit, Limit, Product, assoc, certify_colimit, certify_limit,
                     coproduct, equalizer, finite_colimit, finite_limit, product,
                     pullback, pushout, swap, terminal, times, unit_right)
from .exponential import (Exponential, const_map, curry, ev, exponential, global_element,
                          hom_map, hom_post, hom_pre, uncurry)
from .slices import (Pushforward, SliceMor, SliceObj, fibres, local_exponential, postcompose,
                     postcompose_mor, pullback_functor, pullback_functor_mor,
                     pullback_functor_projection, pushforward, slice_compose, slice_id,
                     slice_obj)
from .elements import (DiscreteFibration, ElCat, category_of_elements, el_map,
                       el_projection, el_roundtrip_iso, from_el, from_el_mor, to_el,
                       to_el_mor)
from .iso import ISO, NOT_ISO, UNKNOWN, IsoResult, find_iso, find_slice_iso
