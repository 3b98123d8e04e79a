//! Concept catalog: every UI element of the head unit software with its
//! app, screen and triggered function, plus the screen navigation graph
//! used by the recording emulator.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UiElement {
    pub element_id: String,
    pub label: String,
    pub app: String,
    pub screen_id: String,
    pub function: String,
    pub interactive: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leads_to_screen: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("duplicate element id {0:?}")]
    Duplicate(String),
    #[error("element {element_id:?} leads to screen {screen_id:?} which has no elements")]
    DanglingScreen { element_id: String, screen_id: String },
    #[error("unknown element {0:?}")]
    NotFound(String),
}

/// A screen and the elements placed on it, in element id order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Screen {
    pub screen_id: String,
    pub elements: Vec<UiElement>,
}

#[derive(Debug, Clone, Default)]
pub struct Catalog {
    elements: BTreeMap<String, UiElement>,
}

impl Catalog {
    /// Builds a catalog, rejecting duplicate ids and navigation targets
    /// that name a screen without elements.
    pub fn from_elements(elements: impl IntoIterator<Item = UiElement>) -> Result<Self, CatalogError> {
        let mut map = BTreeMap::new();
        for element in elements {
            if map.contains_key(&element.element_id) {
                return Err(CatalogError::Duplicate(element.element_id));
            }
            map.insert(element.element_id.clone(), element);
        }
        let screens: BTreeSet<&str> = map.values().map(|e| e.screen_id.as_str()).collect();
        for element in map.values() {
            if let Some(target) = &element.leads_to_screen {
                if !screens.contains(target.as_str()) {
                    return Err(CatalogError::DanglingScreen {
                        element_id: element.element_id.clone(),
                        screen_id: target.clone(),
                    });
                }
            }
        }
        Ok(Self { elements: map })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = &UiElement> {
        self.elements.values()
    }

    pub fn get(&self, element_id: &str) -> Option<&UiElement> {
        self.elements.get(element_id)
    }

    pub fn resolve(&self, element_id: &str) -> Result<&UiElement, CatalogError> {
        self.get(element_id)
            .ok_or_else(|| CatalogError::NotFound(element_id.into()))
    }

    /// Ranked search: exact id match, then label prefix, then substring of
    /// label, app or function (all case-insensitive except the id match).
    /// Ties are ordered by element id.
    pub fn search(&self, query: &str, limit: usize) -> Vec<&UiElement> {
        let query = query.trim();
        if query.is_empty() || limit == 0 {
            return Vec::new();
        }
        let needle = query.to_lowercase();
        let mut hits: Vec<(u8, &UiElement)> = self
            .elements
            .values()
            .filter_map(|e| {
                if e.element_id == query {
                    return Some((0, e));
                }
                let label = e.label.to_lowercase();
                if label.starts_with(&needle) {
                    return Some((1, e));
                }
                let contains = label.contains(&needle)
                    || e.app.to_lowercase().contains(&needle)
                    || e.function.to_lowercase().contains(&needle);
                contains.then_some((2, e))
            })
            .collect();
        hits.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.element_id.cmp(&b.1.element_id)));
        hits.into_iter().take(limit).map(|(_, e)| e).collect()
    }

    pub fn screens(&self) -> Vec<Screen> {
        let mut by_screen: BTreeMap<&str, Vec<UiElement>> = BTreeMap::new();
        for e in self.elements.values() {
            by_screen.entry(e.screen_id.as_str()).or_default().push(e.clone());
        }
        by_screen
            .into_iter()
            .map(|(id, elements)| Screen {
                screen_id: id.into(),
                elements,
            })
            .collect()
    }

    /// Screens reachable from `start` by following `leads_to_screen` links,
    /// `start` included when it exists.
    pub fn reachable_screens(&self, start: &str) -> BTreeSet<String> {
        let mut edges: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for e in self.elements.values() {
            let from = edges.entry(e.screen_id.as_str()).or_default();
            if let Some(to) = &e.leads_to_screen {
                from.push(to.as_str());
            }
        }
        let mut seen = BTreeSet::new();
        if !edges.contains_key(start) {
            return seen;
        }
        let mut queue = VecDeque::from([start]);
        seen.insert(String::from(start));
        while let Some(screen) = queue.pop_front() {
            for next in edges.get(screen).into_iter().flatten() {
                if seen.insert(String::from(*next)) {
                    queue.push_back(next);
                }
            }
        }
        seen
    }

    /// Element ids from `ids` the catalog cannot resolve, each reported once.
    pub fn unknown_ids<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> BTreeSet<String> {
        ids.into_iter()
            .filter(|id| !self.elements.contains_key(*id))
            .map(String::from)
            .collect()
    }
}
