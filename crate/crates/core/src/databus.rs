//! In-process publish/subscribe data bus.
//!
//! The bus connects every layer of the simulation horizontally. Topics are
//! `/`-separated label paths and subscription filters use the MQTT wildcard
//! conventions: `+` matches exactly one level, `#` matches any number of
//! trailing levels and may only appear as the final segment.
//!
//! Delivery is exactly-once per matching subscription, in publication
//! order; there is no loss model. Every published message is appended to a
//! bus log that doubles as the monitoring feed and can be dumped as CSV.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::SimTime;

/// Separator between topic levels.
pub const TOPIC_SEPARATOR: char = '/';

/// Errors constructing topics or subscription filters.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopicError {
    #[error("topic must have at least one segment")]
    Empty,
    #[error("empty segment in `{0}`")]
    EmptySegment(String),
    #[error("wildcard character in topic name `{0}`")]
    WildcardInName(String),
    #[error("`#` must be the final segment in `{0}`")]
    MultiLevelNotLast(String),
    #[error("wildcard must occupy a whole segment in `{0}`")]
    PartialWildcard(String),
}

/// Errors raised by bus operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BusError {
    #[error("bus is shut down")]
    Closed,
    #[error("publish time went backwards: last {last}, got {got}")]
    TimeRegression { last: SimTime, got: SimTime },
    #[error("negative publish time {0}")]
    NegativeTime(SimTime),
    #[error("unknown subscriber {0:?}")]
    UnknownSubscriber(SubscriberId),
    #[error("unknown or inactive subscription {0:?}")]
    UnknownSubscription(SubscriptionHandle),
}

/// A concrete topic path such as `its/v42/location`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Topic {
    segments: Vec<String>,
}

impl Topic {
    /// Parses a topic from its `/`-separated text form.
    ///
    /// Every segment must be non-empty and literal; wildcard characters
    /// are only meaningful in [`SubscriptionFilter`]s.
    pub fn parse(text: &str) -> Result<Self, TopicError> {
        if text.is_empty() {
            return Err(TopicError::Empty);
        }
        let segments: Vec<String> = text.split(TOPIC_SEPARATOR).map(str::to_owned).collect();
        for segment in &segments {
            if segment.is_empty() {
                return Err(TopicError::EmptySegment(text.to_owned()));
            }
            if segment.contains(['+', '#']) {
                return Err(TopicError::WildcardInName(text.to_owned()));
            }
        }
        Ok(Topic { segments })
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }
}

impl fmt::Display for Topic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.segments.join("/"))
    }
}

impl FromStr for Topic {
    type Err = TopicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Topic::parse(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum FilterSegment {
    Literal(String),
    SingleLevel,
    MultiLevel,
}

/// A topic filter: literal segments, `+` (one level) and a trailing `#`
/// (zero or more levels).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubscriptionFilter {
    segments: Vec<FilterSegment>,
}

impl SubscriptionFilter {
    pub fn parse(text: &str) -> Result<Self, TopicError> {
        if text.is_empty() {
            return Err(TopicError::Empty);
        }
        let raw: Vec<&str> = text.split(TOPIC_SEPARATOR).collect();
        let last = raw.len() - 1;
        let mut segments = Vec::with_capacity(raw.len());
        for (i, seg) in raw.iter().enumerate() {
            let parsed = match *seg {
                "" => return Err(TopicError::EmptySegment(text.to_owned())),
                "+" => FilterSegment::SingleLevel,
                "#" if i == last => FilterSegment::MultiLevel,
                "#" => return Err(TopicError::MultiLevelNotLast(text.to_owned())),
                other if other.contains(['+', '#']) => {
                    return Err(TopicError::PartialWildcard(text.to_owned()))
                }
                other => FilterSegment::Literal(other.to_owned()),
            };
            segments.push(parsed);
        }
        Ok(SubscriptionFilter { segments })
    }

    /// True iff this filter matches the topic: `+` consumes exactly one
    /// segment, a trailing `#` consumes zero or more.
    pub fn matches(&self, topic: &Topic) -> bool {
        let levels = topic.segments();
        for (i, seg) in self.segments.iter().enumerate() {
            match seg {
                FilterSegment::MultiLevel => return true,
                FilterSegment::SingleLevel => {
                    if i >= levels.len() {
                        return false;
                    }
                }
                FilterSegment::Literal(lit) => {
                    if levels.get(i).map(String::as_str) != Some(lit.as_str()) {
                        return false;
                    }
                }
            }
        }
        self.segments.len() == levels.len()
    }
}

impl fmt::Display for SubscriptionFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self
            .segments
            .iter()
            .map(|s| match s {
                FilterSegment::Literal(l) => l.as_str(),
                FilterSegment::SingleLevel => "+",
                FilterSegment::MultiLevel => "#",
            })
            .collect();
        write!(f, "{}", parts.join("/"))
    }
}

impl FromStr for SubscriptionFilter {
    type Err = TopicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SubscriptionFilter::parse(s)
    }
}

/// True iff `filter` matches `topic`.
pub fn match_topic(filter: &SubscriptionFilter, topic: &Topic) -> bool {
    filter.matches(topic)
}

/// A message as recorded on the bus log. Ids are assigned by the bus and
/// strictly increase in publication order.
#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub id: u64,
    pub topic: Topic,
    pub payload: Vec<u8>,
    pub timestamp: SimTime,
}

/// Identifies a registered subscriber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubscriberId(u64);

/// Identifies one (filter, subscriber) subscription.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubscriptionHandle(u64);

/// One message delivered to one subscription.
#[derive(Debug, Clone)]
pub struct Delivery {
    pub subscription: SubscriptionHandle,
    pub message: Arc<Message>,
}

struct Subscription {
    handle: SubscriptionHandle,
    subscriber: SubscriberId,
    filter: SubscriptionFilter,
    active: bool,
}

struct Subscriber {
    label: String,
    inbox: Vec<Delivery>,
}

#[derive(Default)]
struct BusInner {
    closed: bool,
    next_message_id: u64,
    next_subscriber_id: u64,
    next_subscription_id: u64,
    last_timestamp: Option<SimTime>,
    subscribers: BTreeMap<SubscriberId, Subscriber>,
    subscriptions: Vec<Subscription>,
    log: Vec<Arc<Message>>,
}

/// The event-driven publish/subscribe bus.
///
/// Publish and subscribe are linearizable (one coarse lock); per-subscriber
/// delivery order is the linearization order, which for a single-threaded
/// caller is simply call order.
pub struct DataBus {
    inner: Mutex<BusInner>,
}

impl Default for DataBus {
    fn default() -> Self {
        Self::new()
    }
}

impl DataBus {
    pub fn new() -> Self {
        DataBus {
            inner: Mutex::new(BusInner::default()),
        }
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, BusInner> {
        self.inner.lock().expect("bus lock poisoned")
    }

    /// Registers a subscriber under a human-readable label.
    pub fn register_subscriber(&self, label: &str) -> SubscriberId {
        let mut inner = self.lock();
        let id = SubscriberId(inner.next_subscriber_id);
        inner.next_subscriber_id += 1;
        inner.subscribers.insert(
            id,
            Subscriber {
                label: label.to_owned(),
                inbox: Vec::new(),
            },
        );
        id
    }

    /// Subscribes `subscriber` to every future message matching `filter`.
    ///
    /// Subscribing the same (filter, subscriber) pair twice is idempotent
    /// and returns the existing handle.
    pub fn subscribe(
        &self,
        filter: SubscriptionFilter,
        subscriber: SubscriberId,
    ) -> Result<SubscriptionHandle, BusError> {
        let mut inner = self.lock();
        if !inner.subscribers.contains_key(&subscriber) {
            return Err(BusError::UnknownSubscriber(subscriber));
        }
        if let Some(existing) = inner
            .subscriptions
            .iter()
            .find(|s| s.active && s.subscriber == subscriber && s.filter == filter)
        {
            return Ok(existing.handle);
        }
        let handle = SubscriptionHandle(inner.next_subscription_id);
        inner.next_subscription_id += 1;
        inner.subscriptions.push(Subscription {
            handle,
            subscriber,
            filter,
            active: true,
        });
        Ok(handle)
    }

    /// Cancels a subscription; subsequent publishes are no longer delivered.
    pub fn unsubscribe(&self, handle: SubscriptionHandle) -> Result<(), BusError> {
        let mut inner = self.lock();
        match inner
            .subscriptions
            .iter_mut()
            .find(|s| s.handle == handle && s.active)
        {
            Some(sub) => {
                sub.active = false;
                Ok(())
            }
            None => Err(BusError::UnknownSubscription(handle)),
        }
    }

    /// Publishes a message, delivering it once per matching subscription.
    ///
    /// Returns the number of subscriptions that matched. Timestamps must be
    /// non-negative and non-decreasing across successive publishes.
    pub fn publish(
        &self,
        topic: Topic,
        payload: Vec<u8>,
        timestamp: SimTime,
    ) -> Result<usize, BusError> {
        let mut inner = self.lock();
        if inner.closed {
            return Err(BusError::Closed);
        }
        if timestamp < 0.0 || !timestamp.is_finite() {
            return Err(BusError::NegativeTime(timestamp));
        }
        if let Some(last) = inner.last_timestamp {
            if timestamp < last {
                return Err(BusError::TimeRegression {
                    last,
                    got: timestamp,
                });
            }
        }
        inner.last_timestamp = Some(timestamp);
        inner.next_message_id += 1;
        let message = Arc::new(Message {
            id: inner.next_message_id,
            topic,
            payload,
            timestamp,
        });
        inner.log.push(Arc::clone(&message));

        let matched: Vec<(SubscriberId, SubscriptionHandle)> = inner
            .subscriptions
            .iter()
            .filter(|s| s.active && s.filter.matches(&message.topic))
            .map(|s| (s.subscriber, s.handle))
            .collect();
        for (subscriber, handle) in &matched {
            let sub = inner
                .subscribers
                .get_mut(subscriber)
                .expect("subscription without subscriber");
            sub.inbox.push(Delivery {
                subscription: *handle,
                message: Arc::clone(&message),
            });
        }
        Ok(matched.len())
    }

    /// Removes and returns the subscriber's pending deliveries in
    /// publication order.
    pub fn take_deliveries(&self, subscriber: SubscriberId) -> Result<Vec<Delivery>, BusError> {
        let mut inner = self.lock();
        match inner.subscribers.get_mut(&subscriber) {
            Some(sub) => Ok(std::mem::take(&mut sub.inbox)),
            None => Err(BusError::UnknownSubscriber(subscriber)),
        }
    }

    pub fn subscriber_label(&self, subscriber: SubscriberId) -> Option<String> {
        self.lock()
            .subscribers
            .get(&subscriber)
            .map(|s| s.label.clone())
    }

    /// Closes the bus; further publishes fail with [`BusError::Closed`].
    pub fn shutdown(&self) {
        self.lock().closed = true;
    }

    pub fn is_closed(&self) -> bool {
        self.lock().closed
    }

    /// Number of messages on the bus log.
    pub fn message_count(&self) -> usize {
        self.lock().log.len()
    }

    /// Snapshot of the full bus log in publication order.
    pub fn log_snapshot(&self) -> Vec<Arc<Message>> {
        self.lock().log.clone()
    }

    /// Dumps the bus log as CSV: `id,timestamp,topic,payload_size`.
    pub fn trace_csv(&self) -> String {
        let inner = self.lock();
        let mut out = String::from("id,timestamp,topic,payload_size\n");
        for msg in &inner.log {
            out.push_str(&format!(
                "{},{},{},{}\n",
                msg.id,
                msg.timestamp,
                msg.topic,
                msg.payload.len()
            ));
        }
        out
    }
}
